#include "glrec/commands.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "glrec/dataset_io.hpp"
#include "glrec/error.hpp"
#include "glrec/infer.hpp"

namespace glrec {

namespace fs = std::filesystem;

namespace {

std::string path_in(const RunConfig& cfg, const char* name) {
  return (fs::path(cfg.out_dir) / name).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("IoError", "cannot write " + path);
  os << text;
}

void ensure_out_dir(const RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  write_text(path_in(cfg, "config.json"), run_config_to_json(cfg));
}

}  // namespace

World load_world(const std::string& dir, const WorldConfig& config) {
  fs::path d(dir);
  WorldFiles files = read_world((d / "profiles.jsonl").string(), (d / "jds.jsonl").string(),
                                (d / "interactions.jsonl").string(), (d / "labels.jsonl").string());
  World world;
  world.config = config;
  world.graph = std::move(files.graph);
  world.profiles = std::move(files.profiles);
  world.jds = std::move(files.jds);
  world.pairs = std::move(files.pairs);
  for (const auto& [id, _] : world.profiles) world.candidates.push_back(id);
  for (const auto& [id, _] : world.jds) world.jobs.push_back(id);
  return world;
}

std::string cmd_synth(const RunConfig& cfg) {
  ensure_out_dir(cfg);
  World world = generate_world(cfg.pipeline.world);
  write_profiles(world, path_in(cfg, "profiles.jsonl"));
  write_jds(world, path_in(cfg, "jds.jsonl"));
  write_interactions(world.graph, path_in(cfg, "interactions.jsonl"));
  write_labels(world.pairs, path_in(cfg, "labels.jsonl"));
  std::ostringstream os;
  os << "synth: " << world.candidates.size() << " candidates, " << world.jobs.size() << " jobs, "
     << world.graph.edges().size() << " edges, " << world.pairs.size() << " labeled pairs -> "
     << cfg.out_dir;
  return os.str();
}

std::string cmd_prepare(const RunConfig& cfg) {
  ensure_out_dir(cfg);
  World world = load_world(cfg.out_dir, cfg.pipeline.world);
  PreparedData data =
      prepare_data(world, cfg.pipeline.prepare, cfg.pipeline.split, cfg.pipeline.model.context_len);
  write_tokenizer(data.tokenizer, path_in(cfg, "tokenizer.jsonl"));
  write_samples(data.train, path_in(cfg, "train_samples.jsonl"));
  write_samples(data.test, path_in(cfg, "test_samples.jsonl"));
  std::ostringstream os;
  os << "prepare: vocab " << data.tokenizer.vocab_size() << ", " << data.train.size()
     << " train / " << data.test.size() << " test samples -> " << cfg.out_dir;
  return os.str();
}

std::string cmd_train(const RunConfig& cfg) {
  ensure_out_dir(cfg);
  PreparedData data;
  data.tokenizer = read_tokenizer(path_in(cfg, "tokenizer.jsonl"));
  data.train =
      read_samples(path_in(cfg, "train_samples.jsonl"), data.tokenizer, cfg.pipeline.model.context_len);
  TrainConfig train_cfg = cfg.pipeline.train;
  if (train_cfg.checkpoint_path.empty()) train_cfg.checkpoint_path = path_in(cfg, "model.ckpt");
  if (train_cfg.log_path.empty()) train_cfg.log_path = path_in(cfg, "train_log.csv");
  Checkpoint ckpt = train_model(data, cfg.pipeline.model, train_cfg);
  double final_loss = 0.0;
  (void)ckpt;
  {
    // Final epoch loss comes from the log the trainer just wrote.
    std::ifstream is(train_cfg.log_path);
    std::string line, last;
    std::getline(is, line);  // header
    while (std::getline(is, line))
      if (!line.empty()) last = line;
    if (!last.empty()) {
      auto first = last.find(',');
      auto second = last.find(',', first + 1);
      final_loss = std::stod(last.substr(first + 1, second - first - 1));
    }
  }
  std::ostringstream os;
  os << "train: " << data.train.size() << " samples, " << cfg.pipeline.train.epochs
     << " epochs, final loss " << final_loss << " -> " << train_cfg.checkpoint_path;
  return os.str();
}

std::string cmd_eval(const RunConfig& cfg) {
  Checkpoint ckpt = load_checkpoint(path_in(cfg, "model.ckpt"));
  auto test = read_samples(path_in(cfg, "test_samples.jsonl"), ckpt.tokenizer,
                           ckpt.config.context_len);
  if (cfg.pipeline.prepare.strategy == AugmentStrategy::SoftSelector ||
      cfg.pipeline.prepare.strategy == AugmentStrategy::Hybrid)
    for (auto& s : test) s.use_selector = true;
  EvalRow row;
  row.task = cfg.pipeline.prepare.task == Task::PointWise ? "pointwise" : "pairwise";
  row.split = to_string(cfg.pipeline.split.kind);
  row.strategy = to_string(cfg.pipeline.prepare.strategy);
  row.path_count = cfg.pipeline.prepare.path_count;
  row.auc = evaluate_auc(ckpt, test);
  row.samples = test.size();
  EvalReport report;
  report.rows.push_back(row);
  write_report_csv(report, path_in(cfg, "eval.csv"));
  return "eval: " + report_summary(report);
}

std::string cmd_ablate(const RunConfig& cfg) {
  ensure_out_dir(cfg);
  EvalReport ablation = run_path_ablation(cfg.pipeline, {0, 1, 2, 3});
  write_report_csv(ablation, path_in(cfg, "ablation.csv"));
  EvalReport bias = run_bias_experiment(
      cfg.pipeline, {AugmentStrategy::None, AugmentStrategy::Shuffle, AugmentStrategy::SoftSelector,
                     AugmentStrategy::Hybrid});
  write_report_csv(bias, path_in(cfg, "bias.csv"));
  return "ablate:\n" + report_summary(ablation) + report_summary(bias);
}

}  // namespace glrec
