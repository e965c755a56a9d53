#include "glrec/dataset_io.hpp"

#include <fstream>

#include <json.hpp>

#include "glrec/error.hpp"

namespace glrec {

using json = nlohmann::ordered_json;

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error("IoError", "cannot open " + path + " for writing");
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("IoError", "cannot open " + path);
  return is;
}

json attrs_to_json(const std::vector<std::pair<std::string, std::string>>& attrs) {
  json a = json::array();
  for (const auto& [k, v] : attrs) a.push_back(json::array({k, v}));
  return a;
}

std::vector<std::pair<std::string, std::string>> attrs_from_json(const json& a) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& kv : a) out.emplace_back(kv.at(0).get<std::string>(), kv.at(1).get<std::string>());
  return out;
}

void check_version(const json& rec, const std::string& path) {
  if (!rec.contains("schema_version") || rec["schema_version"].get<int>() != kSchemaVersion)
    throw Error("SchemaMismatch", "unexpected schema_version in " + path);
}

}  // namespace

void write_profiles(const World& world, const std::string& path) {
  auto os = open_out(path);
  for (NodeId c : world.candidates) {
    const auto& p = world.profiles.at(c);
    json rec;
    rec["schema_version"] = kSchemaVersion;
    rec["node_id"] = p.node;
    rec["attributes"] = attrs_to_json(p.attributes);
    rec["summary"] = p.summary;
    os << rec.dump() << '\n';
  }
}

void write_jds(const World& world, const std::string& path) {
  auto os = open_out(path);
  for (NodeId j : world.jobs) {
    const auto& jd = world.jds.at(j);
    json rec;
    rec["schema_version"] = kSchemaVersion;
    rec["node_id"] = jd.node;
    rec["position_title"] = jd.position_title;
    rec["attributes"] = attrs_to_json(jd.attributes);
    rec["summary"] = jd.summary;
    os << rec.dump() << '\n';
  }
}

void write_interactions(const HeteroGraph& graph, const std::string& path) {
  auto os = open_out(path);
  for (const Edge& e : graph.edges()) {
    json rec;
    rec["schema_version"] = kSchemaVersion;
    rec["source_id"] = e.src;
    rec["source_kind"] = to_string(graph.kind(e.src));
    rec["edge_kind"] = to_string(e.kind);
    rec["target_id"] = e.dst;
    rec["target_kind"] = to_string(graph.kind(e.dst));
    os << rec.dump() << '\n';
  }
}

void write_labels(const std::vector<LabeledPair>& pairs, const std::string& path) {
  auto os = open_out(path);
  for (const auto& p : pairs) {
    json rec;
    rec["schema_version"] = kSchemaVersion;
    rec["candidate"] = p.candidate;
    rec["job"] = p.job;
    rec["label"] = p.label;
    rec["affinity"] = p.affinity;
    os << rec.dump() << '\n';
  }
}

WorldFiles read_world(const std::string& profiles_path, const std::string& jds_path,
                      const std::string& interactions_path, const std::string& labels_path) {
  WorldFiles wf;
  std::string line;

  NodeId max_node = 0;
  std::vector<std::pair<NodeId, NodeKind>> nodes;
  {
    auto is = open_in(profiles_path);
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      json rec = json::parse(line);
      check_version(rec, profiles_path);
      CandidateProfile p;
      p.node = rec.at("node_id").get<NodeId>();
      p.attributes = attrs_from_json(rec.at("attributes"));
      p.summary = rec.value("summary", "");
      max_node = std::max(max_node, p.node);
      nodes.emplace_back(p.node, NodeKind::Candidate);
      wf.profiles[p.node] = std::move(p);
    }
  }
  {
    auto is = open_in(jds_path);
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      json rec = json::parse(line);
      check_version(rec, jds_path);
      JobDescription jd;
      jd.node = rec.at("node_id").get<NodeId>();
      jd.position_title = rec.at("position_title").get<std::string>();
      jd.attributes = attrs_from_json(rec.at("attributes"));
      jd.summary = rec.value("summary", "");
      max_node = std::max(max_node, jd.node);
      nodes.emplace_back(jd.node, NodeKind::Job);
      wf.jds[jd.node] = std::move(jd);
    }
  }
  // Node ids in the files are dense and zero-based (writer invariant).
  std::sort(nodes.begin(), nodes.end());
  for (const auto& [id, kind] : nodes) {
    const NodeId got = wf.graph.add_node(kind);
    if (got != id)
      throw Error("SchemaMismatch", "node ids must be dense and zero-based");
  }
  {
    auto is = open_in(interactions_path);
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      json rec = json::parse(line);
      check_version(rec, interactions_path);
      wf.graph.add_edge(rec.at("source_id").get<NodeId>(),
                        edge_kind_from_string(rec.at("edge_kind").get<std::string>()),
                        rec.at("target_id").get<NodeId>());
    }
  }
  wf.graph.freeze();
  {
    auto is = open_in(labels_path);
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      json rec = json::parse(line);
      check_version(rec, labels_path);
      LabeledPair p;
      p.candidate = rec.at("candidate").get<NodeId>();
      p.job = rec.at("job").get<NodeId>();
      p.label = rec.at("label").get<int>();
      p.affinity = rec.at("affinity").get<double>();
      wf.pairs.push_back(p);
    }
  }
  return wf;
}

void write_samples(const std::vector<PromptSample>& samples, const std::string& path) {
  auto os = open_out(path);
  for (const auto& s : samples) {
    json rec;
    rec["schema_version"] = kSchemaVersion;
    rec["id"] = s.sample_id;
    rec["task"] = s.task == Task::PointWise ? "pointwise" : "pairwise";
    rec["candidate"] = s.candidate;
    rec["jobs"] = s.jobs;
    rec["position_titles"] = s.position_titles;
    rec["instruction"] = s.instruction_text;
    rec["profile"] = s.profile_text;
    rec["paths"] = s.path_prompts;
    rec["jd"] = s.jd_texts;
    rec["label"] = s.label;
    rec["label01"] = s.label01;
    rec["use_selector"] = s.use_selector;
    os << rec.dump() << '\n';
  }
}

std::vector<PromptSample> read_samples_raw(const std::string& path) {
  auto is = open_in(path);
  std::vector<PromptSample> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    json rec = json::parse(line);
    check_version(rec, path);
    PromptSample s;
    s.sample_id = rec.at("id").get<int64_t>();
    s.task = rec.at("task").get<std::string>() == "pointwise" ? Task::PointWise : Task::PairWise;
    s.candidate = rec.at("candidate").get<NodeId>();
    s.jobs = rec.at("jobs").get<std::vector<NodeId>>();
    s.position_titles = rec.at("position_titles").get<std::vector<std::string>>();
    s.instruction_text = rec.at("instruction").get<std::string>();
    s.profile_text = rec.at("profile").get<std::string>();
    s.path_prompts = rec.at("paths").get<std::vector<std::string>>();
    s.jd_texts = rec.at("jd").get<std::vector<std::string>>();
    s.label = rec.at("label").get<std::string>();
    s.label01 = rec.at("label01").get<int>();
    s.use_selector = rec.at("use_selector").get<bool>();
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<PromptSample> read_samples(const std::string& path, const Tokenizer& tokenizer,
                                       int context_len) {
  auto out = read_samples_raw(path);
  for (auto& s : out) assemble_sample(s, tokenizer, context_len);
  return out;
}

void write_tokenizer(const Tokenizer& tokenizer, const std::string& path) {
  auto os = open_out(path);
  json rec;
  rec["schema_version"] = kSchemaVersion;
  rec["vocab"] = tokenizer.vocab();
  os << rec.dump() << '\n';
}

Tokenizer read_tokenizer(const std::string& path) {
  auto is = open_in(path);
  std::string line;
  std::getline(is, line);
  json rec = json::parse(line);
  check_version(rec, path);
  Tokenizer t;
  t.set_vocab(rec.at("vocab").get<std::vector<std::string>>());
  return t;
}

size_t count_lines(const std::string& path) {
  auto is = open_in(path);
  size_t n = 0;
  std::string line;
  while (std::getline(is, line))
    if (!line.empty()) ++n;
  return n;
}

}  // namespace glrec
