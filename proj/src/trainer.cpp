#include "glrec/trainer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>

#include "glrec/error.hpp"
#include "glrec/rng.hpp"

namespace glrec {

void TrainConfig::validate() const {
  if (learning_rate <= 0.0) throw Error("InvalidConfig", "learning rate must be > 0");
  if (epochs < 1) throw Error("InvalidConfig", "epochs must be >= 1");
  if (batch_size < 1) throw Error("InvalidConfig", "batch size must be >= 1");
  if (lambda <= 0.0 || lambda > 0.5) throw Error("InvalidConfig", "lambda must lie in (0, 0.5]");
}

void adam_step(std::vector<double>& params, const std::vector<double>& grads, AdamState& state,
               double lr) {
  if (params.size() != grads.size())
    throw Error("InvalidArgument", "adam_step shape mismatch");
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  if (state.m.size() != params.size()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
    state.t = 0;
  }
  state.t += 1;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));
  for (size_t i = 0; i < params.size(); ++i) {
    state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * grads[i];
    state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * grads[i] * grads[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

SampleForward forward_sample(const Checkpoint& ckpt, const PromptSample& sample, int prefix_len) {
  const int n = static_cast<int>(sample.token_ids.size());
  const int len = prefix_len < 0 ? n - 1 : prefix_len;
  if (len < 1 || len > n)
    throw Error("InvalidArgument", "bad sample prefix length " + std::to_string(len));

  SampleForward sf;
  sf.input_ids.assign(sample.token_ids.begin(), sample.token_ids.begin() + len);
  sf.base_embeddings = embed_tokens(ckpt.base, sf.input_ids);
  sf.input_embeddings = sf.base_embeddings;

  if (sample.use_selector && !sample.path_token_spans.empty()) {
    for (const auto& span : sample.path_token_spans) {
      TokenSpan clipped{span.begin, std::min(span.end, len)};
      if (clipped.begin >= clipped.end) continue;
      sf.spans.push_back(clipped);
      sf.path_h.push_back(mean_pool_path_embedding(sf.base_embeddings, clipped));
    }
    if (!sf.spans.empty()) {
      sf.weights = soft_select_weights(sf.path_h, ckpt.selector);
      apply_residual_reweight(sf.input_embeddings, sf.spans, sf.weights, ckpt.selector.lambda);
      sf.selector_used = true;
    }
  }

  sf.fwd = forward(ckpt.config, ckpt.base, ckpt.adapters, sf.input_embeddings, true);
  return sf;
}

namespace {

// Training layout: logits row t predicts token_ids[t+1].
void training_targets(const PromptSample& sample, std::vector<int>& targets,
                      std::vector<uint8_t>& mask) {
  const size_t n = sample.token_ids.size();
  targets.assign(sample.token_ids.begin() + 1, sample.token_ids.end());
  mask.assign(sample.loss_mask.begin() + 1, sample.loss_mask.end());
  if (targets.empty() || n != targets.size() + 1)
    throw Error("InvalidArgument", "sample too short for autoregressive training");
}

}  // namespace

double sample_loss(const Checkpoint& ckpt, const PromptSample& sample) {
  SampleForward sf = forward_sample(ckpt, sample);
  std::vector<int> targets;
  std::vector<uint8_t> mask;
  training_targets(sample, targets, mask);
  return autoregressive_loss(sf.fwd.logits, targets, mask);
}

double sample_loss_and_grads(const Checkpoint& ckpt, const PromptSample& sample,
                             TrainableGrads& grads) {
  SampleForward sf = forward_sample(ckpt, sample);
  std::vector<int> targets;
  std::vector<uint8_t> mask;
  training_targets(sample, targets, mask);

  const double loss = autoregressive_loss(sf.fwd.logits, targets, mask);
  Mat dlogits = loss_backward_logits(sf.fwd.logits, targets, mask);
  Gradients g = backward(ckpt.config, ckpt.base, ckpt.adapters, sf.fwd, dlogits,
                         /*want_input_grad=*/sf.selector_used);

  // Accumulate adapter grads.
  if (grads.adapters.layers.empty()) grads.adapters = g.adapters;
  else {
    for (size_t l = 0; l < g.adapters.layers.size(); ++l) {
      for (int p = 0; p < 4; ++p) {
        auto& dst = grads.adapters.layers[l].at[p];
        const auto& src = g.adapters.layers[l].at[p];
        if (src && dst) {
          add_inplace(dst->a, src->a);
          add_inplace(dst->b, src->b);
        } else if (src) {
          dst = src;
        }
      }
    }
  }

  if (grads.w_a.size() != ckpt.selector.w_a.size())
    grads.w_a.assign(ckpt.selector.w_a.size(), 0.0);

  if (sf.selector_used) {
    // d loss / d alpha_i = lambda * sum_{t in span i} <d e_hat_t, e_t>
    const Mat& dhat = g.input_embeddings;
    const size_t m = sf.spans.size();
    std::vector<double> dalpha(m, 0.0);
    for (size_t i = 0; i < m; ++i) {
      double acc = 0.0;
      for (int t = sf.spans[i].begin; t < sf.spans[i].end; ++t) {
        const double* de = dhat.row(t);
        const double* e = sf.base_embeddings.row(t);
        for (int c = 0; c < dhat.cols; ++c) acc += de[c] * e[c];
      }
      dalpha[i] = ckpt.selector.lambda * acc;
    }
    // softmax backward into the logits z_i = w_a . H_i
    double dot = 0.0;
    for (size_t i = 0; i < m; ++i) dot += dalpha[i] * sf.weights.alphas[i];
    for (size_t i = 0; i < m; ++i) {
      const double dz = sf.weights.alphas[i] * (dalpha[i] - dot);
      for (size_t c = 0; c < grads.w_a.size(); ++c) grads.w_a[c] += dz * sf.path_h[i][c];
    }
  }
  return loss;
}

namespace {

struct TensorRef {
  std::vector<double>* params;
  const std::vector<double>* grads;
};

}  // namespace

TrainStats fine_tune(const std::vector<PromptSample>& dataset, Checkpoint& ckpt,
                     const TrainConfig& config) {
  config.validate();
  if (dataset.empty()) throw Error("InvalidConfig", "training dataset is empty");
  for (const auto& s : dataset)
    if (static_cast<int>(s.token_ids.size()) > ckpt.config.context_len)
      throw Error("ContextOverflow", "a sample exceeds the model context");

  const auto t_start = std::chrono::steady_clock::now();
  std::ofstream log;
  if (!config.log_path.empty()) {
    log.open(config.log_path, std::ios::trunc);
    log << "epoch,mean_loss,wall_seconds\n";
  }

  // One Adam state per trainable tensor, in a fixed traversal order.
  std::vector<AdamState> states;
  auto for_each_trainable = [&](TrainableGrads& grads, auto&& fn) {
    size_t idx = 0;
    for (size_t l = 0; l < ckpt.adapters.layers.size(); ++l) {
      for (int p = 0; p < 4; ++p) {
        auto& ad = ckpt.adapters.layers[l].at[p];
        if (!ad) continue;
        auto& gd = grads.adapters.layers[l].at[p];
        fn(ad->a.v, gd->a.v, idx++);
        fn(ad->b.v, gd->b.v, idx++);
      }
    }
    fn(ckpt.selector.w_a, grads.w_a, idx++);
  };

  TrainStats stats;
  std::vector<size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Rng rng(config.seed + static_cast<uint64_t>(epoch) * 0x9e37ULL + 17);
    rng.shuffle(order);
    double epoch_loss = 0.0;
    size_t seen = 0;
    for (size_t start = 0; start < order.size(); start += static_cast<size_t>(config.batch_size)) {
      const size_t end = std::min(order.size(), start + static_cast<size_t>(config.batch_size));
      TrainableGrads grads;
      double batch_loss = 0.0;
      for (size_t i = start; i < end; ++i) {
        batch_loss += sample_loss_and_grads(ckpt, dataset[order[i]], grads);
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      if (!std::isfinite(batch_loss))
        throw Error("NonFiniteLoss", "loss diverged at epoch " + std::to_string(epoch) +
                                         ", batch starting " + std::to_string(start));
      epoch_loss += batch_loss;
      seen += end - start;

      // First batch sets the tensor count.
      if (states.empty()) {
        size_t count = 0;
        for_each_trainable(grads, [&](auto&, auto&, size_t) { ++count; });
        states.resize(count);
      }
      for_each_trainable(grads, [&](std::vector<double>& p, std::vector<double>& g, size_t idx) {
        for (double& x : g) x *= inv;
        adam_step(p, g, states[idx], config.learning_rate);
      });
    }
    const double mean_loss = epoch_loss / static_cast<double>(seen);
    stats.epoch_loss.push_back(mean_loss);
    if (epoch == 0) stats.initial_loss = mean_loss;
    if (log.is_open()) {
      const double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
      log << epoch << "," << mean_loss << "," << wall << "\n" << std::flush;
    }
  }
  stats.final_loss = stats.epoch_loss.back();

  if (!config.checkpoint_path.empty()) save_checkpoint(ckpt, config.checkpoint_path);
  return stats;
}

}  // namespace glrec
