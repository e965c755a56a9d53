#pragma once

#include <map>
#include <string>

#include "glrec/checkpoint.hpp"
#include "glrec/prompt.hpp"

namespace glrec {

struct Prediction {
  double probability = 0.5;  // P(Yes) or P(A), renormalized over the label pair
  std::map<std::string, double> label_probs;  // raw vocabulary softmax mass
};

// Softmax row at the first answer position, renormalized over {Yes., No.}.
Prediction predict_pointwise(const Checkpoint& ckpt, const PromptSample& sample);

// Renormalized over {[A]., [B].}; P(A) + P(B) = 1 by construction.
Prediction predict_pairwise(const Checkpoint& ckpt, const PromptSample& sample);

Prediction predict(const Checkpoint& ckpt, const PromptSample& sample);

}  // namespace glrec
