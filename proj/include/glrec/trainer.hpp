#pragma once

#include <string>
#include <vector>

#include "glrec/checkpoint.hpp"
#include "glrec/prompt.hpp"

namespace glrec {

struct TrainConfig {
  double learning_rate = 1e-4;
  int epochs = 3;
  int batch_size = 8;
  AugmentStrategy strategy = AugmentStrategy::None;
  int shuffle_m = 2;
  double lambda = 0.25;
  uint64_t seed = 1;
  std::string checkpoint_path;
  std::string log_path;  // per-epoch CSV: epoch, mean loss, wall seconds

  void validate() const;
};

struct AdamState {
  std::vector<double> m, v;
  int64_t t = 0;
};

// Standard Adam with bias correction; beta1=0.9, beta2=0.999, eps=1e-8.
void adam_step(std::vector<double>& params, const std::vector<double>& grads, AdamState& state,
               double lr);

// Forward pass over one sample with the selector applied when flagged.
struct SampleForward {
  std::vector<int> input_ids;   // token_ids[0 .. n-2]
  Mat base_embeddings;          // pre-selector token embeddings
  Mat input_embeddings;         // post-selector (equal when selector unused)
  std::vector<TokenSpan> spans; // clipped to input length
  std::vector<std::vector<double>> path_h;
  PathWeights weights;
  bool selector_used = false;
  ForwardResult fwd;
};

// Runs the model over the first `prefix_len` tokens of the sample (or the
// whole sequence minus the last token when prefix_len < 0, the training
// layout). Applies Eqs. of the path soft selector when the sample is flagged.
SampleForward forward_sample(const Checkpoint& ckpt, const PromptSample& sample,
                             int prefix_len = -1);

// Masked autoregressive loss of the sample under the checkpoint.
double sample_loss(const Checkpoint& ckpt, const PromptSample& sample);

// Accumulated gradients for one optimization step.
struct TrainableGrads {
  LoraAdapters adapters;
  std::vector<double> w_a;
};

// loss + gradients for all trainables of one sample.
double sample_loss_and_grads(const Checkpoint& ckpt, const PromptSample& sample,
                             TrainableGrads& grads);

struct TrainStats {
  std::vector<double> epoch_loss;
  double initial_loss = 0.0;
  double final_loss = 0.0;
};

// Supervised instruction tuning of {LoRA adapters, selector w_a}; the base
// weights stay frozen. Deterministic given config.seed.
TrainStats fine_tune(const std::vector<PromptSample>& dataset, Checkpoint& ckpt,
                     const TrainConfig& config);

}  // namespace glrec
