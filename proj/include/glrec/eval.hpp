#pragma once

#include <string>
#include <utility>
#include <vector>

#include "glrec/checkpoint.hpp"
#include "glrec/prompt.hpp"

namespace glrec {

enum class SplitKind : uint8_t { Random, OodPosition, OodJd };

const char* to_string(SplitKind k);
SplitKind split_kind_from_string(const std::string& s);

struct SplitSpec {
  SplitKind kind = SplitKind::Random;
  double train_test_ratio = 5.0;  // 5:1
  uint64_t seed = 0;
};

// Random: per-candidate split at the ratio. OodPosition / OodJd: the test
// side's position titles / JD ids never occur on the train side.
std::pair<std::vector<PromptSample>, std::vector<PromptSample>> split_dataset(
    const std::vector<PromptSample>& records, const SplitSpec& spec);

// Rank-based AUC with average ranks for ties. Throws SingleClass when only
// one label value is present.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

struct EvalRow {
  std::string task;
  std::string split;
  std::string strategy;
  int path_count = 0;
  double auc = 0.0;
  size_t samples = 0;
  double mean_ordering_std = 0.0;  // bias runs only
};

struct EvalReport {
  std::vector<EvalRow> rows;
};

void write_report_csv(const EvalReport& report, const std::string& path);
std::string report_summary(const EvalReport& report);

// Scores a test set with the checkpoint and computes AUC.
double evaluate_auc(const Checkpoint& ckpt, const std::vector<PromptSample>& test);

// Per-sample predictions over every path-order permutation. Returns the mean
// AUC across ordering indices and the mean per-sample prediction standard
// deviation (over samples with at least two paths).
struct BiasStats {
  double mean_auc = 0.0;
  double mean_ordering_std = 0.0;
};

BiasStats evaluate_orderings(const Checkpoint& ckpt, const std::vector<PromptSample>& test,
                             int context_len);

}  // namespace glrec
