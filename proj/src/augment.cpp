#include "glrec/augment.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "glrec/rng.hpp"

namespace glrec {

const char* to_string(AugmentStrategy s) {
  switch (s) {
    case AugmentStrategy::None: return "none";
    case AugmentStrategy::Shuffle: return "shuffle";
    case AugmentStrategy::SoftSelector: return "selector";
    case AugmentStrategy::Hybrid: return "hybrid";
  }
  return "?";
}

AugmentStrategy strategy_from_string(const std::string& s) {
  if (s == "none") return AugmentStrategy::None;
  if (s == "shuffle") return AugmentStrategy::Shuffle;
  if (s == "selector") return AugmentStrategy::SoftSelector;
  if (s == "hybrid") return AugmentStrategy::Hybrid;
  throw Error("InvalidStrategy", "unknown augmentation strategy '" + s + "'");
}

SelectorParams::SelectorParams(int d_e, double lambda_value) : w_a(d_e, 0.0), lambda(lambda_value) {
  if (lambda <= 0.0 || lambda > 0.5)
    throw Error("InvalidArgument", "selector lambda must lie in (0, 0.5]");
}

std::vector<PromptSample> shuffle_augment(const PromptSample& sample, int m, uint64_t seed,
                                          const Tokenizer& tokenizer, int context_len) {
  if (m < 1) throw Error("InvalidArgument", "shuffle count m must be >= 1");
  if (sample.path_prompts.size() < 2) return {sample};

  Rng rng(seed);
  std::vector<PromptSample> out;
  std::set<std::vector<std::string>> seen;
  for (int i = 0; i < m; ++i) {
    std::vector<std::string> order = sample.path_prompts;
    rng.shuffle(order);
    if (!seen.insert(order).second) continue;  // duplicate permutation
    PromptSample copy = sample;
    copy.path_prompts = std::move(order);
    assemble_sample(copy, tokenizer, context_len);
    out.push_back(std::move(copy));
  }
  return out;
}

std::vector<double> mean_pool_path_embedding(const Mat& token_embeddings, TokenSpan span) {
  if (span.begin >= span.end || span.begin < 0 || span.end > token_embeddings.rows)
    throw Error("EmptySpan", "mean pooling needs a nonempty in-bounds span");
  std::vector<double> h(token_embeddings.cols, 0.0);
  for (int t = span.begin; t < span.end; ++t) {
    const double* row = token_embeddings.row(t);
    for (int c = 0; c < token_embeddings.cols; ++c) h[c] += row[c];
  }
  const double inv = 1.0 / static_cast<double>(span.end - span.begin);
  for (double& x : h) x *= inv;
  return h;
}

PathWeights soft_select_weights(const std::vector<std::vector<double>>& path_embeddings,
                                const SelectorParams& params) {
  if (path_embeddings.empty())
    throw Error("InvalidArgument", "soft_select_weights needs at least one path embedding");
  std::vector<double> logits(path_embeddings.size(), 0.0);
  for (size_t i = 0; i < path_embeddings.size(); ++i) {
    const auto& h = path_embeddings[i];
    double z = 0.0;
    for (size_t c = 0; c < h.size(); ++c) z += params.w_a[c] * h[c];
    logits[i] = z;
  }
  const double zmax = *std::max_element(logits.begin(), logits.end());
  double denom = 0.0;
  PathWeights w;
  w.alphas.resize(logits.size());
  for (size_t i = 0; i < logits.size(); ++i) {
    w.alphas[i] = std::exp(logits[i] - zmax);
    denom += w.alphas[i];
  }
  for (double& a : w.alphas) a /= denom;
  return w;
}

void apply_residual_reweight(Mat& token_embeddings, const std::vector<TokenSpan>& spans,
                             const PathWeights& weights, double lambda) {
  if (spans.size() != weights.alphas.size())
    throw Error("InvalidArgument", "one weight per span required");
  std::vector<uint8_t> covered(static_cast<size_t>(token_embeddings.rows), 0);
  for (size_t i = 0; i < spans.size(); ++i) {
    const double scale = 1.0 + lambda * weights.alphas[i];
    for (int t = spans[i].begin; t < spans[i].end; ++t) {
      if (covered[static_cast<size_t>(t)])
        throw Error("SpanOverlap", "path token spans overlap at position " + std::to_string(t));
      covered[static_cast<size_t>(t)] = 1;
      double* row = token_embeddings.row(t);
      for (int c = 0; c < token_embeddings.cols; ++c) row[c] *= scale;
    }
  }
}

std::vector<PromptSample> augment(const PromptSample& sample, AugmentStrategy strategy, int m,
                                  uint64_t seed, const Tokenizer& tokenizer, int context_len) {
  switch (strategy) {
    case AugmentStrategy::None:
      return {sample};
    case AugmentStrategy::Shuffle:
      return shuffle_augment(sample, m, seed, tokenizer, context_len);
    case AugmentStrategy::SoftSelector: {
      PromptSample copy = sample;
      copy.use_selector = true;
      return {copy};
    }
    case AugmentStrategy::Hybrid: {
      auto out = shuffle_augment(sample, m, seed, tokenizer, context_len);
      for (auto& s : out) s.use_selector = true;
      return out;
    }
  }
  throw Error("InvalidStrategy", "unreachable");
}

}  // namespace glrec
