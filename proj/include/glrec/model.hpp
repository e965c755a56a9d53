#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "glrec/augment.hpp"
#include "glrec/tensor.hpp"
#include "glrec/tokenizer.hpp"

namespace glrec {

struct ModelConfig {
  int vocab_size = 0;
  int d_e = 64;
  int n_layers = 2;
  int n_heads = 2;
  int context_len = 512;
  int lora_rank = 4;
  double lora_alpha = 8.0;
  bool lora_all_projections = false;  // default: attention Q and V only
  uint64_t seed = 1;

  void validate() const;
};

enum class Proj : int { Q = 0, K = 1, V = 2, O = 3 };

struct LayerWeights {
  std::vector<double> ln1_g, ln1_b, ln2_g, ln2_b;
  Mat wq, wk, wv, wo;  // d_e x d_e; y = x * W
  Mat w1, w2;          // d_e x 4d_e and 4d_e x d_e
  std::vector<double> b1, b2;
};

// Frozen base parameters. Never receives gradients.
struct BaseWeights {
  Mat embed;  // vocab x d_e
  Mat pos;    // context_len x d_e, added to the input inside forward()
  std::vector<LayerWeights> layers;
  std::vector<double> lnf_g, lnf_b;
  Mat wout;  // d_e x vocab
};

BaseWeights init_base_weights(const ModelConfig& cfg);

// One rank-r adapter for a d_in -> d_out projection:
//   y += scaling * (x * A^T) * B^T,  A: r x d_in, B: d_out x r (zero-init).
struct LoraAdapter {
  Mat a, b;
  double scaling = 1.0;
};

struct LayerAdapters {
  std::array<std::optional<LoraAdapter>, 4> at;  // indexed by Proj
};

struct LoraAdapters {
  std::vector<LayerAdapters> layers;
};

LoraAdapters init_lora_adapters(const ModelConfig& cfg);

struct LayerCache {
  Mat x_in, ln1_out;
  std::vector<double> ln1_rstd;
  Mat ln1_xhat;
  Mat q, k, v;
  std::vector<Mat> att;  // per head: seq x seq softmax probs
  Mat att_out;           // pre output-projection
  Mat x_mid, ln2_out;
  std::vector<double> ln2_rstd;
  Mat ln2_xhat;
  Mat h_pre, h_act;
};

struct ForwardResult {
  Mat logits;  // seq x vocab
  Mat input;   // copy of the input embeddings
  std::vector<LayerCache> caches;
  Mat lnf_xhat;
  std::vector<double> lnf_rstd;
  Mat x_final;  // post final layer norm
};

// Gradients of all trainable tensors plus, optionally, the input embeddings
// (needed to chain into the path soft selector).
struct Gradients {
  LoraAdapters adapters;  // a/b hold gradients; scaling unused
  Mat input_embeddings;   // seq x d_e; empty unless requested
};

ForwardResult forward(const ModelConfig& cfg, const BaseWeights& weights,
                      const LoraAdapters& adapters, const Mat& input_embeddings,
                      bool use_causal_mask = true);

// loss = -(1/sum mask) * sum_{t: mask=1} log softmax(logits_t)[target_t]
double autoregressive_loss(const Mat& logits, const std::vector<int>& target_ids,
                           const std::vector<uint8_t>& loss_mask);

// d loss / d logits for the masked mean negative log-likelihood.
Mat loss_backward_logits(const Mat& logits, const std::vector<int>& target_ids,
                         const std::vector<uint8_t>& loss_mask);

Gradients backward(const ModelConfig& cfg, const BaseWeights& weights,
                   const LoraAdapters& adapters, const ForwardResult& result,
                   const Mat& dlogits, bool want_input_grad);

Mat embed_tokens(const BaseWeights& weights, const std::vector<int>& ids);

std::vector<int> decode_greedy(const ModelConfig& cfg, const BaseWeights& weights,
                               const LoraAdapters& adapters, const Mat& prompt_embeddings,
                               int max_new_tokens);

}  // namespace glrec
