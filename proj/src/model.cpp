#include "glrec/model.hpp"

#include <algorithm>
#include <cmath>

#include "glrec/error.hpp"
#include "glrec/rng.hpp"

namespace glrec {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x * kInvSqrt2)); }

double gelu_grad(double x) {
  return 0.5 * (1.0 + std::erf(x * kInvSqrt2)) + x * kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

Mat random_mat(int rows, int cols, double stddev, Rng& rng) {
  Mat m(rows, cols);
  for (double& x : m.v) x = rng.normal(0.0, stddev);
  return m;
}

// y = x * w  [+ scaling * (x * A^T) * B^T]
Mat project(const Mat& x, const Mat& w, const std::optional<LoraAdapter>& ad) {
  Mat y = mul(x, w);
  if (ad) {
    Mat u = mul_tb(x, ad->a);
    Mat delta = mul_tb(u, ad->b);
    for (size_t i = 0; i < y.v.size(); ++i) y.v[i] += ad->scaling * delta.v[i];
  }
  return y;
}

// Backward through project(): accumulates adapter grads, returns dX.
Mat project_backward(const Mat& dy, const Mat& x, const Mat& w,
                     const std::optional<LoraAdapter>& ad, std::optional<LoraAdapter>* grad) {
  Mat dx = mul_tb(dy, w);
  if (ad) {
    Mat u = mul_tb(x, ad->a);   // seq x r
    Mat du = mul(dy, ad->b);    // seq x r
    for (double& g : du.v) g *= ad->scaling;
    Mat db = mul_ta(dy, u);     // d_out x r
    for (double& g : db.v) g *= ad->scaling;
    Mat da = mul_ta(du, x);     // r x d_in
    if (grad && *grad) {
      add_inplace((*grad)->a, da);
      add_inplace((*grad)->b, db);
    }
    Mat dx_ad = mul(du, ad->a);
    add_inplace(dx, dx_ad);
  }
  return dx;
}

void layer_norm_forward(const Mat& x, const std::vector<double>& g, const std::vector<double>& b,
                        Mat& out, Mat& xhat, std::vector<double>& rstd) {
  const int d = x.cols;
  out = Mat(x.rows, d);
  xhat = Mat(x.rows, d);
  rstd.assign(static_cast<size_t>(x.rows), 0.0);
  for (int r = 0; r < x.rows; ++r) {
    const double* xr = x.row(r);
    double mean = 0.0;
    for (int c = 0; c < d; ++c) mean += xr[c];
    mean /= d;
    double var = 0.0;
    for (int c = 0; c < d; ++c) var += (xr[c] - mean) * (xr[c] - mean);
    var /= d;
    const double rs = 1.0 / std::sqrt(var + 1e-5);
    rstd[static_cast<size_t>(r)] = rs;
    double* hr = xhat.row(r);
    double* or_ = out.row(r);
    for (int c = 0; c < d; ++c) {
      hr[c] = (xr[c] - mean) * rs;
      or_[c] = g[static_cast<size_t>(c)] * hr[c] + b[static_cast<size_t>(c)];
    }
  }
}

Mat layer_norm_backward(const Mat& dout, const Mat& xhat, const std::vector<double>& rstd,
                        const std::vector<double>& g) {
  const int d = dout.cols;
  Mat dx(dout.rows, d);
  for (int r = 0; r < dout.rows; ++r) {
    const double* dr = dout.row(r);
    const double* hr = xhat.row(r);
    double m1 = 0.0, m2 = 0.0;
    for (int c = 0; c < d; ++c) {
      const double dxhat = dr[c] * g[static_cast<size_t>(c)];
      m1 += dxhat;
      m2 += dxhat * hr[c];
    }
    m1 /= d;
    m2 /= d;
    double* out = dx.row(r);
    const double rs = rstd[static_cast<size_t>(r)];
    for (int c = 0; c < d; ++c) {
      const double dxhat = dr[c] * g[static_cast<size_t>(c)];
      out[c] = rs * (dxhat - m1 - hr[c] * m2);
    }
  }
  return dx;
}

Mat head_slice(const Mat& m, int head, int head_dim) {
  Mat s(m.rows, head_dim);
  for (int r = 0; r < m.rows; ++r) {
    const double* src = m.row(r) + head * head_dim;
    std::copy(src, src + head_dim, s.row(r));
  }
  return s;
}

void head_unslice(Mat& full, const Mat& s, int head, int head_dim) {
  for (int r = 0; r < s.rows; ++r) {
    double* dst = full.row(r) + head * head_dim;
    const double* src = s.row(r);
    for (int c = 0; c < head_dim; ++c) dst[c] += src[c];
  }
}

}  // namespace

void ModelConfig::validate() const {
  if (vocab_size < Tokenizer::kNumSpecial)
    throw Error("InvalidConfig", "vocab_size must cover the reserved tokens");
  if (d_e <= 0 || n_heads <= 0 || d_e % n_heads != 0)
    throw Error("InvalidConfig", "d_e must be positive and divisible by n_heads");
  if (n_layers < 1) throw Error("InvalidConfig", "n_layers must be >= 1");
  if (lora_rank < 1) throw Error("InvalidConfig", "lora_rank must be >= 1");
  if (context_len < 2) throw Error("InvalidConfig", "context_len must be >= 2");
}

BaseWeights init_base_weights(const ModelConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const double std_w = 0.08;
  BaseWeights w;
  w.embed = random_mat(cfg.vocab_size, cfg.d_e, std_w, rng);
  w.pos = random_mat(cfg.context_len, cfg.d_e, std_w, rng);
  w.layers.resize(static_cast<size_t>(cfg.n_layers));
  for (auto& layer : w.layers) {
    layer.ln1_g.assign(static_cast<size_t>(cfg.d_e), 1.0);
    layer.ln1_b.assign(static_cast<size_t>(cfg.d_e), 0.0);
    layer.ln2_g.assign(static_cast<size_t>(cfg.d_e), 1.0);
    layer.ln2_b.assign(static_cast<size_t>(cfg.d_e), 0.0);
    layer.wq = random_mat(cfg.d_e, cfg.d_e, std_w, rng);
    layer.wk = random_mat(cfg.d_e, cfg.d_e, std_w, rng);
    layer.wv = random_mat(cfg.d_e, cfg.d_e, std_w, rng);
    layer.wo = random_mat(cfg.d_e, cfg.d_e, std_w, rng);
    layer.w1 = random_mat(cfg.d_e, 4 * cfg.d_e, std_w, rng);
    layer.w2 = random_mat(4 * cfg.d_e, cfg.d_e, std_w, rng);
    layer.b1.assign(static_cast<size_t>(4 * cfg.d_e), 0.0);
    layer.b2.assign(static_cast<size_t>(cfg.d_e), 0.0);
  }
  w.lnf_g.assign(static_cast<size_t>(cfg.d_e), 1.0);
  w.lnf_b.assign(static_cast<size_t>(cfg.d_e), 0.0);
  w.wout = random_mat(cfg.d_e, cfg.vocab_size, std_w, rng);
  return w;
}

LoraAdapters init_lora_adapters(const ModelConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed + 0x10f0);
  LoraAdapters ad;
  ad.layers.resize(static_cast<size_t>(cfg.n_layers));
  const double scaling = cfg.lora_alpha / cfg.lora_rank;
  auto make = [&]() {
    LoraAdapter a;
    a.a = random_mat(cfg.lora_rank, cfg.d_e, 0.02, rng);
    a.b = Mat(cfg.d_e, cfg.lora_rank);  // zero: adapter is a no-op at start
    a.scaling = scaling;
    return a;
  };
  for (auto& layer : ad.layers) {
    layer.at[static_cast<int>(Proj::Q)] = make();
    layer.at[static_cast<int>(Proj::V)] = make();
    if (cfg.lora_all_projections) {
      layer.at[static_cast<int>(Proj::K)] = make();
      layer.at[static_cast<int>(Proj::O)] = make();
    }
  }
  return ad;
}

ForwardResult forward(const ModelConfig& cfg, const BaseWeights& weights,
                      const LoraAdapters& adapters, const Mat& input_embeddings,
                      bool use_causal_mask) {
  if (input_embeddings.rows > cfg.context_len)
    throw Error("ContextOverflow", "sequence length " + std::to_string(input_embeddings.rows) +
                                       " exceeds context " + std::to_string(cfg.context_len));
  const int seq = input_embeddings.rows;
  const int d = cfg.d_e;
  const int hd = d / cfg.n_heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(hd));

  ForwardResult res;
  res.input = input_embeddings;
  res.caches.resize(static_cast<size_t>(cfg.n_layers));

  Mat x = input_embeddings;
  for (int r = 0; r < seq; ++r) {
    double* row = x.row(r);
    const double* pr = weights.pos.row(r);
    for (int cdim = 0; cdim < d; ++cdim) row[cdim] += pr[cdim];
  }
  for (int l = 0; l < cfg.n_layers; ++l) {
    LayerCache& c = res.caches[static_cast<size_t>(l)];
    const LayerWeights& w = weights.layers[static_cast<size_t>(l)];
    static const LayerAdapters kNoAdapters{};
    const LayerAdapters& la =
        adapters.layers.empty() ? kNoAdapters : adapters.layers[static_cast<size_t>(l)];
    c.x_in = x;
    layer_norm_forward(x, w.ln1_g, w.ln1_b, c.ln1_out, c.ln1_xhat, c.ln1_rstd);
    c.q = project(c.ln1_out, w.wq, la.at[static_cast<int>(Proj::Q)]);
    c.k = project(c.ln1_out, w.wk, la.at[static_cast<int>(Proj::K)]);
    c.v = project(c.ln1_out, w.wv, la.at[static_cast<int>(Proj::V)]);

    c.att.assign(static_cast<size_t>(cfg.n_heads), Mat());
    c.att_out = Mat(seq, d);
    for (int h = 0; h < cfg.n_heads; ++h) {
      Mat qh = head_slice(c.q, h, hd);
      Mat kh = head_slice(c.k, h, hd);
      Mat vh = head_slice(c.v, h, hd);
      Mat p(seq, seq);
      for (int i = 0; i < seq; ++i) {
        const int jmax = use_causal_mask ? i : seq - 1;
        double zmax = -1e300;
        std::vector<double> s(static_cast<size_t>(jmax) + 1);
        for (int j = 0; j <= jmax; ++j) {
          double dot = 0.0;
          for (int t = 0; t < hd; ++t) dot += qh(i, t) * kh(j, t);
          s[static_cast<size_t>(j)] = dot * scale;
          zmax = std::max(zmax, s[static_cast<size_t>(j)]);
        }
        double denom = 0.0;
        for (int j = 0; j <= jmax; ++j) {
          s[static_cast<size_t>(j)] = std::exp(s[static_cast<size_t>(j)] - zmax);
          denom += s[static_cast<size_t>(j)];
        }
        for (int j = 0; j <= jmax; ++j) p(i, j) = s[static_cast<size_t>(j)] / denom;
      }
      Mat oh = mul(p, vh);
      head_unslice(c.att_out, oh, h, hd);
      c.att[static_cast<size_t>(h)] = std::move(p);
    }

    Mat proj = project(c.att_out, w.wo, la.at[static_cast<int>(Proj::O)]);
    c.x_mid = c.x_in;
    add_inplace(c.x_mid, proj);

    layer_norm_forward(c.x_mid, w.ln2_g, w.ln2_b, c.ln2_out, c.ln2_xhat, c.ln2_rstd);
    c.h_pre = mul(c.ln2_out, w.w1);
    for (int r = 0; r < seq; ++r) {
      double* row = c.h_pre.row(r);
      for (int j = 0; j < 4 * d; ++j) row[j] += w.b1[static_cast<size_t>(j)];
    }
    c.h_act = c.h_pre;
    for (double& v : c.h_act.v) v = gelu(v);
    Mat ffn = mul(c.h_act, w.w2);
    for (int r = 0; r < seq; ++r) {
      double* row = ffn.row(r);
      for (int j = 0; j < d; ++j) row[j] += w.b2[static_cast<size_t>(j)];
    }
    x = c.x_mid;
    add_inplace(x, ffn);
  }

  layer_norm_forward(x, weights.lnf_g, weights.lnf_b, res.x_final, res.lnf_xhat, res.lnf_rstd);
  res.logits = mul(res.x_final, weights.wout);
  return res;
}

double autoregressive_loss(const Mat& logits, const std::vector<int>& target_ids,
                           const std::vector<uint8_t>& loss_mask) {
  if (static_cast<int>(target_ids.size()) != logits.rows ||
      target_ids.size() != loss_mask.size())
    throw Error("InvalidArgument", "targets/mask must align with logits rows");
  int n = 0;
  double total = 0.0;
  for (int t = 0; t < logits.rows; ++t) {
    if (!loss_mask[static_cast<size_t>(t)]) continue;
    ++n;
    const double* row = logits.row(t);
    double zmax = -1e300;
    for (int j = 0; j < logits.cols; ++j) zmax = std::max(zmax, row[j]);
    double denom = 0.0;
    for (int j = 0; j < logits.cols; ++j) denom += std::exp(row[j] - zmax);
    total += std::log(denom) + zmax - row[target_ids[static_cast<size_t>(t)]];
  }
  if (n == 0) throw Error("AllMaskedOut", "loss needs at least one masked-in position");
  return total / n;
}

Mat loss_backward_logits(const Mat& logits, const std::vector<int>& target_ids,
                         const std::vector<uint8_t>& loss_mask) {
  int n = 0;
  for (uint8_t m : loss_mask)
    if (m) ++n;
  if (n == 0) throw Error("AllMaskedOut", "loss needs at least one masked-in position");
  Mat d(logits.rows, logits.cols);
  for (int t = 0; t < logits.rows; ++t) {
    if (!loss_mask[static_cast<size_t>(t)]) continue;
    const double* row = logits.row(t);
    double* out = d.row(t);
    double zmax = -1e300;
    for (int j = 0; j < logits.cols; ++j) zmax = std::max(zmax, row[j]);
    double denom = 0.0;
    for (int j = 0; j < logits.cols; ++j) denom += std::exp(row[j] - zmax);
    for (int j = 0; j < logits.cols; ++j) out[j] = std::exp(row[j] - zmax) / denom / n;
    out[target_ids[static_cast<size_t>(t)]] -= 1.0 / n;
  }
  return d;
}

Gradients backward(const ModelConfig& cfg, const BaseWeights& weights,
                   const LoraAdapters& adapters, const ForwardResult& result,
                   const Mat& dlogits, bool want_input_grad) {
  const int seq = result.input.rows;
  const int d = cfg.d_e;
  const int hd = d / cfg.n_heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(hd));

  Gradients grads;
  grads.adapters.layers.resize(static_cast<size_t>(cfg.n_layers));
  for (int l = 0; l < cfg.n_layers && !adapters.layers.empty(); ++l) {
    for (int p = 0; p < 4; ++p) {
      const auto& ad = adapters.layers[static_cast<size_t>(l)].at[p];
      if (ad) {
        LoraAdapter g;
        g.a = Mat(ad->a.rows, ad->a.cols);
        g.b = Mat(ad->b.rows, ad->b.cols);
        g.scaling = ad->scaling;
        grads.adapters.layers[static_cast<size_t>(l)].at[p] = std::move(g);
      }
    }
  }

  // logits = x_final * wout
  Mat dx = mul_tb(dlogits, weights.wout);
  dx = layer_norm_backward(dx, result.lnf_xhat, result.lnf_rstd, weights.lnf_g);

  static const LayerAdapters kNoAdapters{};
  for (int l = cfg.n_layers - 1; l >= 0; --l) {
    const LayerCache& c = result.caches[static_cast<size_t>(l)];
    const LayerWeights& w = weights.layers[static_cast<size_t>(l)];
    const LayerAdapters& la =
        adapters.layers.empty() ? kNoAdapters : adapters.layers[static_cast<size_t>(l)];
    LayerAdapters& lg = grads.adapters.layers[static_cast<size_t>(l)];

    // x_out = x_mid + ffn(ln2(x_mid))
    Mat dh_act = mul_tb(dx, w.w2);
    Mat dh_pre = dh_act;
    for (size_t i = 0; i < dh_pre.v.size(); ++i) dh_pre.v[i] *= gelu_grad(c.h_pre.v[i]);
    Mat dln2 = mul_tb(dh_pre, w.w1);
    Mat dx_mid = layer_norm_backward(dln2, c.ln2_xhat, c.ln2_rstd, w.ln2_g);
    add_inplace(dx_mid, dx);

    // x_mid = x_in + wo-projection of attention output
    Mat datt_out = project_backward(dx_mid, c.att_out, w.wo, la.at[static_cast<int>(Proj::O)],
                                    &lg.at[static_cast<int>(Proj::O)]);

    Mat dq(seq, d), dk(seq, d), dv(seq, d);
    for (int h = 0; h < cfg.n_heads; ++h) {
      Mat doh = head_slice(datt_out, h, hd);
      Mat qh = head_slice(c.q, h, hd);
      Mat kh = head_slice(c.k, h, hd);
      Mat vh = head_slice(c.v, h, hd);
      const Mat& p = c.att[static_cast<size_t>(h)];

      Mat dvh = mul_ta(p, doh);
      Mat dp = mul_tb(doh, vh);
      Mat ds(seq, seq);
      for (int i = 0; i < seq; ++i) {
        double dot = 0.0;
        for (int j = 0; j < seq; ++j) dot += dp(i, j) * p(i, j);
        for (int j = 0; j < seq; ++j) ds(i, j) = p(i, j) * (dp(i, j) - dot);
      }
      Mat dqh = mul(ds, kh);
      for (double& g : dqh.v) g *= scale;
      Mat dkh = mul_ta(ds, qh);
      for (double& g : dkh.v) g *= scale;
      head_unslice(dq, dqh, h, hd);
      head_unslice(dk, dkh, h, hd);
      head_unslice(dv, dvh, h, hd);
    }

    Mat dln1 = project_backward(dq, c.ln1_out, w.wq, la.at[static_cast<int>(Proj::Q)],
                                &lg.at[static_cast<int>(Proj::Q)]);
    Mat dln1_k = project_backward(dk, c.ln1_out, w.wk, la.at[static_cast<int>(Proj::K)],
                                  &lg.at[static_cast<int>(Proj::K)]);
    Mat dln1_v = project_backward(dv, c.ln1_out, w.wv, la.at[static_cast<int>(Proj::V)],
                                  &lg.at[static_cast<int>(Proj::V)]);
    add_inplace(dln1, dln1_k);
    add_inplace(dln1, dln1_v);

    Mat dx_in = layer_norm_backward(dln1, c.ln1_xhat, c.ln1_rstd, w.ln1_g);
    add_inplace(dx_in, dx_mid);
    dx = std::move(dx_in);
  }

  if (want_input_grad) grads.input_embeddings = std::move(dx);
  return grads;
}

Mat embed_tokens(const BaseWeights& weights, const std::vector<int>& ids) {
  Mat e(static_cast<int>(ids.size()), weights.embed.cols);
  for (size_t t = 0; t < ids.size(); ++t) {
    const int id = ids[t];
    if (id < 0 || id >= weights.embed.rows)
      throw Error("UnknownToken", "token id " + std::to_string(id) + " outside embedding table");
    std::copy(weights.embed.row(id), weights.embed.row(id) + weights.embed.cols,
              e.row(static_cast<int>(t)));
  }
  return e;
}

std::vector<int> decode_greedy(const ModelConfig& cfg, const BaseWeights& weights,
                               const LoraAdapters& adapters, const Mat& prompt_embeddings,
                               int max_new_tokens) {
  if (prompt_embeddings.rows < 1)
    throw Error("InvalidArgument", "decode_greedy needs a nonempty prompt");
  if (prompt_embeddings.rows > cfg.context_len)
    throw Error("ContextOverflow", "prompt exceeds context window");
  std::vector<int> out;
  Mat x = prompt_embeddings;
  for (int step = 0; step < max_new_tokens; ++step) {
    if (x.rows > cfg.context_len) break;
    ForwardResult res = forward(cfg, weights, adapters, x, true);
    const double* row = res.logits.row(res.logits.rows - 1);
    int best = 0;
    for (int j = 1; j < res.logits.cols; ++j)
      if (row[j] > row[best]) best = j;
    out.push_back(best);
    if (best == Tokenizer::kEos) break;
    Mat next(x.rows + 1, x.cols);
    std::copy(x.v.begin(), x.v.end(), next.v.begin());
    std::copy(weights.embed.row(best), weights.embed.row(best) + weights.embed.cols,
              next.row(x.rows));
    x = std::move(next);
  }
  return out;
}

}  // namespace glrec
