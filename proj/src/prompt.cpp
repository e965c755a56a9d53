#include "glrec/prompt.hpp"

#include <algorithm>

namespace glrec {

std::string render_attributes(const std::vector<std::pair<std::string, std::string>>& attrs) {
  std::string out;
  for (const auto& [key, value] : attrs) {
    if (!out.empty()) out += ", ";
    out += key + ": " + value;
  }
  return out;
}

std::string render_profile_text(const CandidateProfile& profile) {
  return render_attributes(profile.attributes);
}

std::string render_jd_text(const JobDescription& jd) {
  return render_attributes(jd.attributes);
}

const std::string& pointwise_instruction() {
  static const std::string text =
      "Would the candidate be satisfied with this job? Answer \"Yes.\" or \"No.\"";
  return text;
}

const std::string& pairwise_instruction() {
  static const std::string text =
      "Which job matches this candidate? Answer \"[A].\" or \"[B].\"";
  return text;
}

PhraseRegistry::PhraseRegistry() {
  phrases_[EdgeKind::Interview] = "interviewed for position";
  phrases_[EdgeKind::Message] = "discussed with";
  phrases_[EdgeKind::Match] = "matched with";
  phrases_[EdgeKind::Browse] = "browsed";
}

void PhraseRegistry::set(EdgeKind kind, std::string phrase) {
  phrases_[kind] = std::move(phrase);
}

const std::string& PhraseRegistry::phrase(EdgeKind kind) const {
  auto it = phrases_.find(kind);
  if (it == phrases_.end())
    throw Error("UnregisteredEdgeKind", std::string("no phrase for edge kind ") + to_string(kind));
  return it->second;
}

namespace {

std::string node_text(NodeId node, const std::map<NodeId, CandidateProfile>& profiles,
                      const std::map<NodeId, JobDescription>& jds, bool* is_job) {
  if (auto it = jds.find(node); it != jds.end()) {
    if (is_job) *is_job = true;
    return it->second.summary.empty() ? render_jd_text(it->second) : it->second.summary;
  }
  if (auto it = profiles.find(node); it != profiles.end()) {
    if (is_job) *is_job = false;
    return it->second.summary.empty() ? render_profile_text(it->second) : it->second.summary;
  }
  throw Error("MissingNodeText", "node " + std::to_string(node) + " has no profile or JD text");
}

}  // namespace

std::string render_meta_path_prompt(const MetaPathInstance& instance,
                                    const std::map<NodeId, CandidateProfile>& profiles,
                                    const std::map<NodeId, JobDescription>& jds,
                                    const PhraseRegistry& registry) {
  if (instance.edges.empty() || instance.nodes.size() != instance.edges.size() + 1)
    throw Error("MissingNodeText", "meta-path instance must carry l+1 nodes and l >= 1 edges");
  std::string out;
  for (size_t i = 0; i < instance.edges.size(); ++i) {
    bool subject_is_job = false;
    std::string subject = node_text(instance.nodes[i], profiles, jds, &subject_is_job);
    if (i > 0) subject = subject_is_job ? "This position" : "This job seeker";
    const std::string object = node_text(instance.nodes[i + 1], profiles, jds, nullptr);
    if (!out.empty()) out += " ";
    out += subject + " " + registry.phrase(instance.edges[i]) + " " + object + ".";
  }
  return out;
}

int label_token_id(Task task, const std::string& label) {
  if (task == Task::PointWise) {
    if (label == "Yes") return Tokenizer::kYes;
    if (label == "No") return Tokenizer::kNo;
  } else {
    if (label == "A") return Tokenizer::kLabelA;
    if (label == "B") return Tokenizer::kLabelB;
  }
  throw Error("InvalidLabel", "label '" + label + "' not valid for task");
}

void assemble_sample(PromptSample& sample, const Tokenizer& tokenizer, int context_len) {
  std::vector<int> ids;
  ids.push_back(Tokenizer::kBos);
  auto append = [&](const std::string& text) {
    auto enc = tokenizer.encode(text);
    ids.insert(ids.end(), enc.begin(), enc.end());
  };
  append(sample.instruction_text);
  append("Candidate Profile: " + sample.profile_text);

  sample.path_token_spans.clear();
  for (const auto& path : sample.path_prompts) {
    TokenSpan span;
    span.begin = static_cast<int>(ids.size());
    append(path);
    span.end = static_cast<int>(ids.size());
    sample.path_token_spans.push_back(span);
  }

  if (sample.task == Task::PointWise) {
    append("JD: " + sample.jd_texts.at(0));
  } else {
    append("Option A: " + sample.jd_texts.at(0));
    append("Option B: " + sample.jd_texts.at(1));
  }

  const size_t answer_begin = ids.size();
  ids.push_back(label_token_id(sample.task, sample.label));
  // Ground-truth append: the chosen option's JD text follows the label token.
  const std::string& chosen_jd =
      (sample.task == Task::PairWise && sample.label == "B") ? sample.jd_texts.at(1)
                                                             : sample.jd_texts.at(0);
  append(chosen_jd);

  if (static_cast<int>(ids.size()) > context_len)
    throw Error("TokenBudgetExceeded", "sample length " + std::to_string(ids.size()) +
                                           " exceeds context " + std::to_string(context_len));

  sample.token_ids = std::move(ids);
  sample.loss_mask.assign(sample.token_ids.size(), 0);
  for (size_t i = answer_begin; i < sample.token_ids.size(); ++i) sample.loss_mask[i] = 1;
}

PromptSample build_pointwise_sample(const CandidateProfile& profile, const JobDescription& jd,
                                    const std::vector<std::string>& paths, const std::string& label,
                                    const Tokenizer& tokenizer, int context_len) {
  PromptSample s;
  s.task = Task::PointWise;
  s.instruction_text = pointwise_instruction();
  s.profile_text = render_profile_text(profile);
  s.path_prompts = paths;
  s.jd_texts = {render_jd_text(jd)};
  s.label = label;
  s.candidate = profile.node;
  s.jobs = {jd.node};
  s.position_titles = {jd.position_title};
  s.label01 = label == "Yes" ? 1 : 0;
  assemble_sample(s, tokenizer, context_len);
  return s;
}

PromptSample build_pairwise_sample(const CandidateProfile& profile, const JobDescription& jd_a,
                                   const JobDescription& jd_b,
                                   const std::vector<std::string>& paths, const std::string& label,
                                   const Tokenizer& tokenizer, int context_len) {
  PromptSample s;
  s.task = Task::PairWise;
  s.instruction_text = pairwise_instruction();
  s.profile_text = render_profile_text(profile);
  s.path_prompts = paths;
  s.jd_texts = {render_jd_text(jd_a), render_jd_text(jd_b)};
  s.label = label;
  s.candidate = profile.node;
  s.jobs = {jd_a.node, jd_b.node};
  s.position_titles = {jd_a.position_title, jd_b.position_title};
  s.label01 = label == "A" ? 1 : 0;
  assemble_sample(s, tokenizer, context_len);
  return s;
}

}  // namespace glrec
