#pragma once

#include <vector>

#include "glrec/prompt.hpp"
#include "glrec/tensor.hpp"

namespace glrec {

enum class AugmentStrategy : uint8_t { None, Shuffle, SoftSelector, Hybrid };

const char* to_string(AugmentStrategy s);
AugmentStrategy strategy_from_string(const std::string& s);

// Path soft selector parameters: a single linear scorer over mean-pooled
// path embeddings plus the residual controller lambda in (0, 0.5].
struct SelectorParams {
  std::vector<double> w_a;
  double lambda = 0.25;

  SelectorParams() = default;
  SelectorParams(int d_e, double lambda_value);
};

struct PathWeights {
  std::vector<double> alphas;  // each >= 0, sums to 1
};

// Materializes m permutations of the sample's path prompts (re-tokenized,
// masks rebuilt). Duplicate orderings are collapsed; samples with fewer than
// two paths come back unchanged as a single copy.
std::vector<PromptSample> shuffle_augment(const PromptSample& sample, int m, uint64_t seed,
                                          const Tokenizer& tokenizer, int context_len);

// H_i: elementwise mean of the token embeddings of one path span.
std::vector<double> mean_pool_path_embedding(const Mat& token_embeddings, TokenSpan span);

// alpha_i = softmax(w_a . H_i), computed with max subtraction.
PathWeights soft_select_weights(const std::vector<std::vector<double>>& path_embeddings,
                                const SelectorParams& params);

// e_t <- (1 + lambda * alpha_i) * e_t for t in span i; other rows untouched.
void apply_residual_reweight(Mat& token_embeddings, const std::vector<TokenSpan>& spans,
                             const PathWeights& weights, double lambda);

std::vector<PromptSample> augment(const PromptSample& sample, AugmentStrategy strategy, int m,
                                  uint64_t seed, const Tokenizer& tokenizer, int context_len);

}  // namespace glrec
