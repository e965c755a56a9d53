#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "glrec/graph.hpp"
#include "glrec/tokenizer.hpp"

namespace glrec {

struct CandidateProfile {
  NodeId node = 0;
  // Ordered (key, value) attribute pairs, e.g. ("Age", "25").
  std::vector<std::pair<std::string, std::string>> attributes;
  // Short description used when this node appears inside a meta-path
  // sentence; falls back to the rendered attributes when empty.
  std::string summary;
};

struct JobDescription {
  NodeId node = 0;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::string position_title;  // nonempty; keys the OOD_position split
  std::string summary;
};

enum class Task : uint8_t { PointWise, PairWise };

struct TokenSpan {
  int begin = 0;  // inclusive index into token_ids
  int end = 0;    // exclusive
};

// One assembled instruction-tuning sequence. loss_mask is 1 exactly on the
// ground-truth suffix (label token + appended JD text); the label token is
// always the first masked-in position.
struct PromptSample {
  Task task = Task::PointWise;
  std::string instruction_text;
  std::string profile_text;
  std::vector<std::string> path_prompts;
  std::vector<std::string> jd_texts;  // one (point-wise) or two (pair-wise)
  std::string label;                  // "Yes" / "No" / "A" / "B"
  bool use_selector = false;          // trainer applies the path soft selector

  std::vector<int> token_ids;
  std::vector<uint8_t> loss_mask;
  std::vector<TokenSpan> path_token_spans;

  // provenance for splits and evaluation
  int64_t sample_id = 0;
  NodeId candidate = 0;
  std::vector<NodeId> jobs;
  std::vector<std::string> position_titles;
  int label01 = 0;  // point-wise: Yes=1; pair-wise: A=1
};

std::string render_profile_text(const CandidateProfile& profile);
std::string render_jd_text(const JobDescription& jd);

const std::string& pointwise_instruction();
const std::string& pairwise_instruction();

// Edge-kind phrase registry for meta-path narration.
class PhraseRegistry {
 public:
  PhraseRegistry();  // defaults: interview/message/match/browse phrases
  void set(EdgeKind kind, std::string phrase);
  const std::string& phrase(EdgeKind kind) const;  // UnregisteredEdgeKind

 private:
  std::map<EdgeKind, std::string> phrases_;
};

// One sentence per edge, in path order. Node descriptions come from the
// profile/JD text of the node on each end.
std::string render_meta_path_prompt(const MetaPathInstance& instance,
                                    const std::map<NodeId, CandidateProfile>& profiles,
                                    const std::map<NodeId, JobDescription>& jds,
                                    const PhraseRegistry& registry = PhraseRegistry());

int label_token_id(Task task, const std::string& label);

// Rebuilds token_ids, loss_mask and path_token_spans from the sample's text
// fields. Used by the builders and again after shuffle augmentation.
void assemble_sample(PromptSample& sample, const Tokenizer& tokenizer, int context_len);

PromptSample build_pointwise_sample(const CandidateProfile& profile, const JobDescription& jd,
                                    const std::vector<std::string>& paths, const std::string& label,
                                    const Tokenizer& tokenizer, int context_len);

PromptSample build_pairwise_sample(const CandidateProfile& profile, const JobDescription& jd_a,
                                   const JobDescription& jd_b,
                                   const std::vector<std::string>& paths, const std::string& label,
                                   const Tokenizer& tokenizer, int context_len);

}  // namespace glrec
