#include "glrec/infer.hpp"

#include <cmath>

#include "glrec/error.hpp"
#include "glrec/trainer.hpp"

namespace glrec {

namespace {

// Answer position = first masked-in token. Forward runs on the prompt prefix
// so the last logits row is the model's distribution for the label token.
Prediction predict_labels(const Checkpoint& ckpt, const PromptSample& sample, int id_pos,
                          int id_neg, const std::string& name_pos, const std::string& name_neg) {
  int answer = -1;
  for (size_t i = 0; i < sample.loss_mask.size(); ++i) {
    if (sample.loss_mask[i]) {
      answer = static_cast<int>(i);
      break;
    }
  }
  if (answer < 1) throw Error("InvalidArgument", "sample has no answer position");

  SampleForward sf = forward_sample(ckpt, sample, answer);
  const Mat& logits = sf.fwd.logits;
  const double* row = logits.row(logits.rows - 1);
  double zmax = row[0];
  for (int j = 1; j < logits.cols; ++j) zmax = std::max(zmax, row[j]);
  double denom = 0.0;
  for (int j = 0; j < logits.cols; ++j) denom += std::exp(row[j] - zmax);
  const double p_pos = std::exp(row[id_pos] - zmax) / denom;
  const double p_neg = std::exp(row[id_neg] - zmax) / denom;

  Prediction pred;
  pred.label_probs[name_pos] = p_pos;
  pred.label_probs[name_neg] = p_neg;
  pred.probability = p_pos / (p_pos + p_neg);
  return pred;
}

}  // namespace

Prediction predict_pointwise(const Checkpoint& ckpt, const PromptSample& sample) {
  if (sample.task != Task::PointWise)
    throw Error("InvalidArgument", "predict_pointwise expects a point-wise sample");
  return predict_labels(ckpt, sample, Tokenizer::kYes, Tokenizer::kNo, "Yes.", "No.");
}

Prediction predict_pairwise(const Checkpoint& ckpt, const PromptSample& sample) {
  if (sample.task != Task::PairWise)
    throw Error("InvalidArgument", "predict_pairwise expects a pair-wise sample");
  return predict_labels(ckpt, sample, Tokenizer::kLabelA, Tokenizer::kLabelB, "[A].", "[B].");
}

Prediction predict(const Checkpoint& ckpt, const PromptSample& sample) {
  return sample.task == Task::PointWise ? predict_pointwise(ckpt, sample)
                                        : predict_pairwise(ckpt, sample);
}

}  // namespace glrec
