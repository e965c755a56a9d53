#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "glrec/augment.hpp"
#include "glrec/rng.hpp"

using namespace glrec;

namespace {

Tokenizer tiny_tokenizer() {
  return Tokenizer::fit({"path one alpha . path two beta . path three gamma .",
                         "candidate profile : skills alpha , jd : beta you are a recommender yes"},
                        256);
}

PromptSample three_path_sample(const Tokenizer& tok) {
  PromptSample s;
  s.task = Task::PointWise;
  s.instruction_text = "you are a recommender";
  s.profile_text = "skills alpha";
  s.path_prompts = {"path one alpha .", "path two beta .", "path three gamma ."};
  s.jd_texts = {"beta"};
  s.label = "Yes";
  s.label01 = 1;
  assemble_sample(s, tok, 256);
  return s;
}

}  // namespace

TEST_CASE("strategy round trips through strings") {
  for (AugmentStrategy s : {AugmentStrategy::None, AugmentStrategy::Shuffle,
                            AugmentStrategy::SoftSelector, AugmentStrategy::Hybrid})
    CHECK(strategy_from_string(to_string(s)) == s);
  CHECK_THROWS_AS(strategy_from_string("bogus"), Error);
}

TEST_CASE("selector params validate lambda") {
  CHECK_THROWS_AS(SelectorParams(4, 0.0), Error);
  CHECK_THROWS_AS(SelectorParams(4, 0.6), Error);
  CHECK(SelectorParams(4, 0.5).lambda == 0.5);
  CHECK(SelectorParams(4, 0.25).w_a.size() == 4);
}

TEST_CASE("shuffle_augment permutes path sets without changing membership") {
  Tokenizer tok = tiny_tokenizer();
  PromptSample s = three_path_sample(tok);
  auto outs = shuffle_augment(s, 4, 11, tok, 256);
  CHECK(outs.size() >= 1);
  CHECK(outs.size() <= 4);

  std::vector<std::string> want = s.path_prompts;
  std::sort(want.begin(), want.end());
  std::vector<std::vector<std::string>> orderings;
  for (const auto& o : outs) {
    std::vector<std::string> got = o.path_prompts;
    orderings.push_back(got);
    std::sort(got.begin(), got.end());
    CHECK(got == want);  // sort-and-compare oracle
    // masks and ids rebuilt for the permuted text
    CHECK(o.token_ids.size() == o.loss_mask.size());
    CHECK(o.path_token_spans.size() == 3);
  }
  // duplicate orderings are collapsed
  std::sort(orderings.begin(), orderings.end());
  CHECK(std::adjacent_find(orderings.begin(), orderings.end()) == orderings.end());
}

TEST_CASE("shuffle_augment passes single-path samples through") {
  Tokenizer tok = tiny_tokenizer();
  PromptSample s = three_path_sample(tok);
  s.path_prompts = {"path one alpha ."};
  assemble_sample(s, tok, 256);
  auto outs = shuffle_augment(s, 4, 11, tok, 256);
  REQUIRE(outs.size() == 1);
  CHECK(outs[0].token_ids == s.token_ids);
}

TEST_CASE("mean_pool_path_embedding") {
  Mat e(3, 2);
  e(0, 0) = 2;  e(0, 1) = 4;
  e(1, 0) = 1;  e(1, 1) = 0;
  e(2, 0) = 0;  e(2, 1) = 1;
  CHECK(mean_pool_path_embedding(e, {0, 1}) == std::vector<double>{2, 4});
  CHECK(mean_pool_path_embedding(e, {1, 3}) == std::vector<double>{0.5, 0.5});
  CHECK_THROWS_WITH_AS(mean_pool_path_embedding(e, {2, 2}), doctest::Contains("EmptySpan"), Error);

  // recompute with compensated summation
  Rng rng(3);
  Mat big(5, 7);
  for (double& x : big.v) x = rng.normal();
  auto got = mean_pool_path_embedding(big, {0, 5});
  for (int c = 0; c < 7; ++c) {
    double sum = 0.0, comp = 0.0;
    for (int r = 0; r < 5; ++r) {
      const double y = big(r, c) - comp;
      const double t = sum + y;
      comp = (t - sum) - y;
      sum = t;
    }
    CHECK(std::abs(got[static_cast<size_t>(c)] - sum / 5.0) < 1e-12);
  }
}

TEST_CASE("soft_select_weights softmax contract") {
  SelectorParams params(2, 0.25);
  CHECK(soft_select_weights({{1.0, 0.0}}, params).alphas == std::vector<double>{1.0});

  // identical embeddings -> uniform
  params.w_a = {0.3, -0.7};
  auto w = soft_select_weights({{1.0, 2.0}, {1.0, 2.0}, {1.0, 2.0}}, params);
  for (double a : w.alphas) CHECK(a == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  // logits [ln 2, 0] -> [2/3, 1/3]
  params.w_a = {1.0, 0.0};
  auto v = soft_select_weights({{std::log(2.0), 9.0}, {0.0, 5.0}}, params);
  CHECK(v.alphas[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(v.alphas[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  // sums to one, nonnegative, shift-invariant
  Rng rng(8);
  SelectorParams p2(6, 0.25);
  for (double& x : p2.w_a) x = rng.normal();
  std::vector<std::vector<double>> hs;
  for (int i = 0; i < 5; ++i) {
    std::vector<double> h(6);
    for (double& x : h) x = rng.normal();
    hs.push_back(h);
  }
  auto a = soft_select_weights(hs, p2);
  double total = 0.0;
  for (double x : a.alphas) {
    CHECK(x >= 0.0);
    total += x;
  }
  CHECK(std::abs(total - 1.0) < 1e-9);

  // shifting every logit by a constant c: add c*u to each H where w_a.u = c
  // equivalently test invariance by shifting embeddings along w_a direction
  const double norm2 =
      std::inner_product(p2.w_a.begin(), p2.w_a.end(), p2.w_a.begin(), 0.0);
  auto shifted = hs;
  for (auto& h : shifted)
    for (size_t c = 0; c < h.size(); ++c) h[c] += 3.7 * p2.w_a[c] / norm2;
  auto b = soft_select_weights(shifted, p2);
  for (size_t i = 0; i < a.alphas.size(); ++i)
    CHECK(std::abs(a.alphas[i] - b.alphas[i]) < 1e-12);
}

TEST_CASE("apply_residual_reweight scales spans only") {
  Mat e(4, 2);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 2; ++c) e(r, c) = 1.0;
  PathWeights w;
  w.alphas = {0.5};
  apply_residual_reweight(e, {{1, 3}}, w, 0.5);
  CHECK(e(0, 0) == 1.0);  // outside: bytes-equal
  CHECK(e(1, 0) == 1.25);
  CHECK(e(2, 1) == 1.25);
  CHECK(e(3, 1) == 1.0);

  // elementwise recomputation oracle with 2 spans
  Rng rng(12);
  Mat m(9, 3), orig(9, 3);
  for (size_t i = 0; i < m.v.size(); ++i) m.v[i] = orig.v[i] = rng.normal();
  PathWeights w2;
  w2.alphas = {0.7, 0.3};
  const double lambda = 0.4;
  std::vector<TokenSpan> spans = {{1, 4}, {5, 7}};
  apply_residual_reweight(m, spans, w2, lambda);
  for (int r = 0; r < 9; ++r) {
    double scale = 1.0;
    if (r >= 1 && r < 4) scale = 1.0 + lambda * 0.7;
    if (r >= 5 && r < 7) scale = 1.0 + lambda * 0.3;
    for (int c = 0; c < 3; ++c) CHECK(std::abs(m(r, c) - scale * orig(r, c)) < 1e-12);
  }

  CHECK_THROWS_WITH_AS(apply_residual_reweight(m, {{0, 3}, {2, 5}}, w2, lambda),
                       doctest::Contains("SpanOverlap"), Error);
}

TEST_CASE("augment dispatch per strategy") {
  Tokenizer tok = tiny_tokenizer();
  PromptSample s = three_path_sample(tok);

  auto none = augment(s, AugmentStrategy::None, 2, 5, tok, 256);
  REQUIRE(none.size() == 1);
  CHECK(none[0].token_ids == s.token_ids);
  CHECK_FALSE(none[0].use_selector);

  auto soft = augment(s, AugmentStrategy::SoftSelector, 2, 5, tok, 256);
  REQUIRE(soft.size() == 1);
  CHECK(soft[0].use_selector);
  CHECK(soft[0].token_ids == s.token_ids);

  auto shuffled = augment(s, AugmentStrategy::Shuffle, 3, 5, tok, 256);
  auto hybrid = augment(s, AugmentStrategy::Hybrid, 3, 5, tok, 256);
  REQUIRE(shuffled.size() == hybrid.size());
  for (size_t i = 0; i < shuffled.size(); ++i) {
    CHECK_FALSE(shuffled[i].use_selector);
    CHECK(hybrid[i].use_selector);
    CHECK(shuffled[i].path_prompts == hybrid[i].path_prompts);  // same seed, same orderings
    CHECK(shuffled[i].token_ids == hybrid[i].token_ids);
  }
}
