#pragma once

#include <string>
#include <vector>

#include "glrec/prompt.hpp"
#include "glrec/synth.hpp"

namespace glrec {

inline constexpr int kSchemaVersion = 1;

// Line-delimited JSON files; every record carries a schema_version field.
void write_profiles(const World& world, const std::string& path);
void write_jds(const World& world, const std::string& path);
void write_interactions(const HeteroGraph& graph, const std::string& path);
void write_labels(const std::vector<LabeledPair>& pairs, const std::string& path);

struct WorldFiles {
  std::map<NodeId, CandidateProfile> profiles;
  std::map<NodeId, JobDescription> jds;
  HeteroGraph graph;
  std::vector<LabeledPair> pairs;
};

WorldFiles read_world(const std::string& profiles_path, const std::string& jds_path,
                      const std::string& interactions_path, const std::string& labels_path);

// Prompt samples: text fields plus provenance; token ids are rebuilt from the
// tokenizer at load time.
void write_samples(const std::vector<PromptSample>& samples, const std::string& path);
std::vector<PromptSample> read_samples(const std::string& path, const Tokenizer& tokenizer,
                                       int context_len);
// Raw text-level read without re-tokenization (schema checks, round trips).
std::vector<PromptSample> read_samples_raw(const std::string& path);

void write_tokenizer(const Tokenizer& tokenizer, const std::string& path);
Tokenizer read_tokenizer(const std::string& path);

size_t count_lines(const std::string& path);

}  // namespace glrec
