#include "glrec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "glrec/error.hpp"
#include "glrec/infer.hpp"
#include "glrec/rng.hpp"

namespace glrec {

const char* to_string(SplitKind k) {
  switch (k) {
    case SplitKind::Random: return "random";
    case SplitKind::OodPosition: return "ood-position";
    case SplitKind::OodJd: return "ood-jd";
  }
  return "?";
}

SplitKind split_kind_from_string(const std::string& s) {
  if (s == "random") return SplitKind::Random;
  if (s == "ood-position") return SplitKind::OodPosition;
  if (s == "ood-jd") return SplitKind::OodJd;
  throw Error("InvalidSplit", "unknown split kind '" + s + "'");
}

namespace {

// Partition distinct keys so roughly 1/(ratio+1) of the records land in test.
template <typename KeyOf>
std::pair<std::vector<PromptSample>, std::vector<PromptSample>> ood_split(
    const std::vector<PromptSample>& records, const SplitSpec& spec, KeyOf&& key_of) {
  std::map<std::string, size_t> key_counts;
  for (const auto& r : records)
    for (const auto& k : key_of(r)) key_counts[k] += 1;
  if (key_counts.size() < 2)
    throw Error("InsufficientDiversity",
                "OOD split needs at least 2 distinct keys, got " +
                    std::to_string(key_counts.size()));

  std::vector<std::string> keys;
  for (const auto& [k, _] : key_counts) keys.push_back(k);
  Rng rng(spec.seed ^ 0x00df00d);
  rng.shuffle(keys);

  const double test_frac = 1.0 / (spec.train_test_ratio + 1.0);
  const size_t target = static_cast<size_t>(
      std::max(1.0, std::round(test_frac * static_cast<double>(records.size()))));
  std::set<std::string> test_keys;
  size_t covered = 0;
  for (const auto& k : keys) {
    if (covered >= target) break;
    test_keys.insert(k);
    covered += key_counts[k];
  }
  if (test_keys.size() == keys.size()) test_keys.erase(keys.front());

  std::pair<std::vector<PromptSample>, std::vector<PromptSample>> out;
  for (const auto& r : records) {
    bool any_test = false, any_train = false;
    for (const auto& k : key_of(r)) (test_keys.count(k) ? any_test : any_train) = true;
    // Records touching both sides are dropped so the intersection stays empty.
    if (any_test && !any_train) out.second.push_back(r);
    else if (!any_test) out.first.push_back(r);
  }
  return out;
}

}  // namespace

std::pair<std::vector<PromptSample>, std::vector<PromptSample>> split_dataset(
    const std::vector<PromptSample>& records, const SplitSpec& spec) {
  if (records.empty()) throw Error("InvalidArgument", "cannot split an empty dataset");
  if (spec.train_test_ratio <= 0.0)
    throw Error("InvalidConfig", "train/test ratio must be positive");

  if (spec.kind == SplitKind::OodPosition) {
    return ood_split(records, spec, [](const PromptSample& s) { return s.position_titles; });
  }
  if (spec.kind == SplitKind::OodJd) {
    return ood_split(records, spec, [](const PromptSample& s) {
      std::vector<std::string> keys;
      for (NodeId j : s.jobs) keys.push_back(std::to_string(j));
      return keys;
    });
  }

  // Random: per-candidate split of that candidate's records. Largest-remainder
  // apportionment across users pins the global test size to round(total/(r+1)).
  std::map<NodeId, std::vector<size_t>> by_user;
  for (size_t i = 0; i < records.size(); ++i) by_user[records[i].candidate].push_back(i);
  const double test_frac = 1.0 / (spec.train_test_ratio + 1.0);
  const size_t global_target = static_cast<size_t>(
      std::round(test_frac * static_cast<double>(records.size())));

  std::vector<NodeId> users;
  std::map<NodeId, size_t> n_test;
  size_t assigned = 0;
  for (auto& [user, idxs] : by_user) {
    users.push_back(user);
    n_test[user] = static_cast<size_t>(test_frac * static_cast<double>(idxs.size()));
    assigned += n_test[user];
  }
  std::sort(users.begin(), users.end(), [&](NodeId a, NodeId b) {
    const double ra = test_frac * static_cast<double>(by_user[a].size()) -
                      static_cast<double>(n_test[a]);
    const double rb = test_frac * static_cast<double>(by_user[b].size()) -
                      static_cast<double>(n_test[b]);
    if (ra != rb) return ra > rb;
    return a < b;
  });
  for (NodeId u : users) {
    if (assigned >= global_target) break;
    if (n_test[u] < by_user[u].size()) {
      ++n_test[u];
      ++assigned;
    }
  }

  std::pair<std::vector<PromptSample>, std::vector<PromptSample>> out;
  for (auto& [user, idxs] : by_user) {
    Rng rng(spec.seed ^ (0xabcd1234ULL + user * 0x9e3779b9ULL));
    rng.shuffle(idxs);
    for (size_t i = 0; i < idxs.size(); ++i) {
      (i < n_test[user] ? out.second : out.first).push_back(records[idxs[i]]);
    }
  }
  return out;
}

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size() || scores.empty())
    throw Error("InvalidArgument", "scores/labels mismatch");
  size_t n_pos = 0, n_neg = 0;
  for (int l : labels) (l ? n_pos : n_neg) += 1;
  if (n_pos == 0 || n_neg == 0)
    throw Error("SingleClass", "AUC needs both classes present");

  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] < scores[b]; });

  double rank_sum_pos = 0.0;
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
    for (size_t t = i; t < j; ++t)
      if (labels[order[t]]) rank_sum_pos += avg_rank;
    i = j;
  }
  return (rank_sum_pos - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1)) /
         (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

void write_report_csv(const EvalReport& report, const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error("IoError", "cannot write report " + path);
  os << "task,split,strategy,path_count,auc,samples,mean_ordering_std\n";
  os << std::setprecision(17);
  for (const auto& r : report.rows) {
    os << r.task << ',' << r.split << ',' << r.strategy << ',' << r.path_count << ','
       << r.auc << ',' << r.samples << ',' << r.mean_ordering_std << '\n';
  }
}

std::string report_summary(const EvalReport& report) {
  std::ostringstream os;
  for (const auto& r : report.rows) {
    os << r.task << " / " << r.split << " / " << r.strategy << " / paths=" << r.path_count
       << "  AUC=" << r.auc << "  n=" << r.samples;
    if (r.mean_ordering_std > 0.0) os << "  ordering_std=" << r.mean_ordering_std;
    os << '\n';
  }
  return os.str();
}

double evaluate_auc(const Checkpoint& ckpt, const std::vector<PromptSample>& test) {
  std::vector<double> scores;
  std::vector<int> labels;
  for (const auto& s : test) {
    scores.push_back(predict(ckpt, s).probability);
    labels.push_back(s.label01);
  }
  return auc(scores, labels);
}

namespace {

size_t factorial(size_t n) {
  size_t f = 1;
  for (size_t i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

BiasStats evaluate_orderings(const Checkpoint& ckpt, const std::vector<PromptSample>& test,
                             int context_len) {
  size_t max_orders = 1;
  std::vector<std::vector<double>> preds(test.size());  // per sample, per ordering
  double std_sum = 0.0;
  size_t std_count = 0;

  for (size_t si = 0; si < test.size(); ++si) {
    const PromptSample& s = test[si];
    std::vector<std::string> order = s.path_prompts;
    std::sort(order.begin(), order.end());
    const size_t n_orders = factorial(order.size());
    max_orders = std::max(max_orders, n_orders);
    do {
      PromptSample perm = s;
      perm.path_prompts = order;
      assemble_sample(perm, ckpt.tokenizer, context_len);
      preds[si].push_back(predict(ckpt, perm).probability);
    } while (std::next_permutation(order.begin(), order.end()));

    if (preds[si].size() >= 2) {
      double mean = 0.0;
      for (double p : preds[si]) mean += p;
      mean /= static_cast<double>(preds[si].size());
      double var = 0.0;
      for (double p : preds[si]) var += (p - mean) * (p - mean);
      var /= static_cast<double>(preds[si].size());
      std_sum += std::sqrt(var);
      ++std_count;
    }
  }

  BiasStats stats;
  stats.mean_ordering_std = std_count ? std_sum / static_cast<double>(std_count) : 0.0;

  double auc_sum = 0.0;
  for (size_t o = 0; o < max_orders; ++o) {
    std::vector<double> scores;
    std::vector<int> labels;
    for (size_t si = 0; si < test.size(); ++si) {
      scores.push_back(preds[si][o % preds[si].size()]);
      labels.push_back(test[si].label01);
    }
    auc_sum += auc(scores, labels);
  }
  stats.mean_auc = auc_sum / static_cast<double>(max_orders);
  return stats;
}

}  // namespace glrec
