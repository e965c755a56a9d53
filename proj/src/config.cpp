#include "glrec/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "glrec/error.hpp"

namespace glrec {

using json = nlohmann::ordered_json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!known.count(key))
      throw Error("InvalidConfig", "unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void get_if(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

}  // namespace

void RunConfig::validate() const {
  pipeline.world.validate();
  pipeline.model.validate();
  pipeline.train.validate();
  pipeline.prepare.validate();
  if (pipeline.split.train_test_ratio <= 0.0)
    throw Error("InvalidConfig", "train_test_ratio must be positive");
  if (out_dir.empty()) throw Error("InvalidConfig", "out_dir must be set");
}

void RunConfig::apply_seed() {
  pipeline.world.seed = seed;
  pipeline.model.seed = seed;
  pipeline.train.seed = seed;
  pipeline.prepare.seed = seed;
  pipeline.split.seed = seed;
}

RunConfig default_run_config() {
  RunConfig cfg;
  // vocab_size is filled from the fitted tokenizer at train time; the
  // placeholder keeps validate() happy.
  cfg.pipeline.model.vocab_size = 8192;
  cfg.apply_seed();
  return cfg;
}

RunConfig parse_run_config(const std::string& json_text) {
  json root = json::parse(json_text);
  RunConfig cfg = default_run_config();

  reject_unknown(root, {"seed", "out_dir", "world", "model", "train", "prepare", "split"},
                 "top level");
  get_if(root, "seed", cfg.seed);
  cfg.apply_seed();
  get_if(root, "out_dir", cfg.out_dir);

  if (root.contains("world")) {
    const json& w = root["world"];
    reject_unknown(w,
                   {"n_candidates", "n_jobs", "n_skills", "n_position_titles",
                    "interactions_per_candidate", "theta_match", "noise_rate", "seed"},
                   "world");
    auto& wc = cfg.pipeline.world;
    get_if(w, "n_candidates", wc.n_candidates);
    get_if(w, "n_jobs", wc.n_jobs);
    get_if(w, "n_skills", wc.n_skills);
    get_if(w, "n_position_titles", wc.n_position_titles);
    get_if(w, "interactions_per_candidate", wc.interactions_per_candidate);
    get_if(w, "theta_match", wc.theta_match);
    get_if(w, "noise_rate", wc.noise_rate);
    get_if(w, "seed", wc.seed);
  }
  if (root.contains("model")) {
    const json& m = root["model"];
    reject_unknown(m,
                   {"d_e", "n_layers", "n_heads", "context_len", "lora_rank", "lora_alpha",
                    "lora_all_projections", "seed"},
                   "model");
    auto& mc = cfg.pipeline.model;
    get_if(m, "d_e", mc.d_e);
    get_if(m, "n_layers", mc.n_layers);
    get_if(m, "n_heads", mc.n_heads);
    get_if(m, "context_len", mc.context_len);
    get_if(m, "lora_rank", mc.lora_rank);
    get_if(m, "lora_alpha", mc.lora_alpha);
    get_if(m, "lora_all_projections", mc.lora_all_projections);
    get_if(m, "seed", mc.seed);
  }
  if (root.contains("train")) {
    const json& t = root["train"];
    reject_unknown(t,
                   {"learning_rate", "epochs", "batch_size", "strategy", "shuffle_m", "lambda",
                    "seed"},
                   "train");
    auto& tc = cfg.pipeline.train;
    get_if(t, "learning_rate", tc.learning_rate);
    get_if(t, "epochs", tc.epochs);
    get_if(t, "batch_size", tc.batch_size);
    if (t.contains("strategy")) tc.strategy = strategy_from_string(t["strategy"].get<std::string>());
    get_if(t, "shuffle_m", tc.shuffle_m);
    get_if(t, "lambda", tc.lambda);
    get_if(t, "seed", tc.seed);
  }
  if (root.contains("prepare")) {
    const json& p = root["prepare"];
    reject_unknown(p,
                   {"task", "path_count", "gamma", "num_walks", "max_edges", "strategy",
                    "shuffle_m", "max_vocab", "seed"},
                   "prepare");
    auto& pc = cfg.pipeline.prepare;
    if (p.contains("task"))
      pc.task = p["task"].get<std::string>() == "pairwise" ? Task::PairWise : Task::PointWise;
    get_if(p, "path_count", pc.path_count);
    get_if(p, "gamma", pc.gamma);
    get_if(p, "num_walks", pc.num_walks);
    get_if(p, "max_edges", pc.max_edges);
    if (p.contains("strategy")) pc.strategy = strategy_from_string(p["strategy"].get<std::string>());
    get_if(p, "shuffle_m", pc.shuffle_m);
    get_if(p, "max_vocab", pc.max_vocab);
    get_if(p, "seed", pc.seed);
  }
  if (root.contains("split")) {
    const json& s = root["split"];
    reject_unknown(s, {"kind", "train_test_ratio", "seed"}, "split");
    auto& sc = cfg.pipeline.split;
    if (s.contains("kind")) sc.kind = split_kind_from_string(s["kind"].get<std::string>());
    get_if(s, "train_test_ratio", sc.train_test_ratio);
    get_if(s, "seed", sc.seed);
  }

  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("IoError", "cannot open config " + path);
  std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return parse_run_config(text);
}

std::string run_config_to_json(const RunConfig& cfg) {
  json root;
  root["seed"] = cfg.seed;
  root["out_dir"] = cfg.out_dir;
  const auto& w = cfg.pipeline.world;
  root["world"] = {{"n_candidates", w.n_candidates},
                   {"n_jobs", w.n_jobs},
                   {"n_skills", w.n_skills},
                   {"n_position_titles", w.n_position_titles},
                   {"interactions_per_candidate", w.interactions_per_candidate},
                   {"theta_match", w.theta_match},
                   {"noise_rate", w.noise_rate},
                   {"seed", w.seed}};
  const auto& m = cfg.pipeline.model;
  root["model"] = {{"d_e", m.d_e},
                   {"n_layers", m.n_layers},
                   {"n_heads", m.n_heads},
                   {"context_len", m.context_len},
                   {"lora_rank", m.lora_rank},
                   {"lora_alpha", m.lora_alpha},
                   {"lora_all_projections", m.lora_all_projections},
                   {"seed", m.seed}};
  const auto& t = cfg.pipeline.train;
  root["train"] = {{"learning_rate", t.learning_rate},
                   {"epochs", t.epochs},
                   {"batch_size", t.batch_size},
                   {"strategy", to_string(t.strategy)},
                   {"shuffle_m", t.shuffle_m},
                   {"lambda", t.lambda},
                   {"seed", t.seed}};
  const auto& p = cfg.pipeline.prepare;
  root["prepare"] = {{"task", p.task == Task::PointWise ? "pointwise" : "pairwise"},
                     {"path_count", p.path_count},
                     {"gamma", p.gamma},
                     {"num_walks", p.num_walks},
                     {"max_edges", p.max_edges},
                     {"strategy", to_string(p.strategy)},
                     {"shuffle_m", p.shuffle_m},
                     {"max_vocab", p.max_vocab},
                     {"seed", p.seed}};
  const auto& s = cfg.pipeline.split;
  root["split"] = {{"kind", to_string(s.kind)},
                   {"train_test_ratio", s.train_test_ratio},
                   {"seed", s.seed}};
  return root.dump(2) + "\n";
}

}  // namespace glrec
