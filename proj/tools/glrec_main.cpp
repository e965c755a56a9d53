#include <functional>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "glrec/commands.hpp"
#include "glrec/error.hpp"

namespace {

struct CliOverrides {
  std::string config_path;
  int64_t seed = -1;
  std::string out_dir;
  std::string task;
  int paths = -1;
  std::string strategy;
  std::string split;
};

glrec::RunConfig resolve_config(const CliOverrides& o) {
  glrec::RunConfig cfg =
      o.config_path.empty() ? glrec::default_run_config() : glrec::load_run_config(o.config_path);
  if (o.seed >= 0) {
    cfg.seed = static_cast<uint64_t>(o.seed);
    cfg.apply_seed();
  }
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  if (!o.task.empty()) {
    if (o.task != "pointwise" && o.task != "pairwise")
      throw glrec::Error("InvalidConfig", "task must be pointwise or pairwise, got " + o.task);
    cfg.pipeline.prepare.task =
        o.task == "pairwise" ? glrec::Task::PairWise : glrec::Task::PointWise;
  }
  if (o.paths >= 0) cfg.pipeline.prepare.path_count = o.paths;
  if (!o.strategy.empty()) {
    cfg.pipeline.prepare.strategy = glrec::strategy_from_string(o.strategy);
    cfg.pipeline.train.strategy = cfg.pipeline.prepare.strategy;
  }
  if (!o.split.empty()) cfg.pipeline.split.kind = glrec::split_kind_from_string(o.split);
  cfg.validate();
  return cfg;
}

void add_common_flags(CLI::App* sub, CliOverrides& o) {
  sub->add_option("--config", o.config_path, "JSON run configuration file");
  sub->add_option("--seed", o.seed, "master seed propagated to every stage");
  sub->add_option("--out", o.out_dir, "output directory");
  sub->add_option("--task", o.task, "pointwise or pairwise");
  sub->add_option("--paths", o.paths, "meta-path budget per candidate");
  sub->add_option("--strategy", o.strategy, "none, shuffle, soft_selector or hybrid");
  sub->add_option("--split", o.split, "random, ood_position or ood_jd");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph-aware instruction-tuned job recommender"};
  app.require_subcommand(1);

  CliOverrides overrides;
  std::function<std::string(const glrec::RunConfig&)> body;

  struct Sub {
    const char* name;
    const char* help;
    std::string (*fn)(const glrec::RunConfig&);
  };
  const Sub subs[] = {
      {"synth", "generate a synthetic recruitment world", glrec::cmd_synth},
      {"prepare", "fit the tokenizer and build prompt samples", glrec::cmd_prepare},
      {"train", "fine-tune adapters on the prepared train set", glrec::cmd_train},
      {"eval", "score the prepared test set", glrec::cmd_eval},
      {"ablate", "run path-count and ordering-bias experiments", glrec::cmd_ablate},
  };
  for (const Sub& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    add_common_flags(sub, overrides);
    sub->callback([&body, fn = s.fn] { body = fn; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    glrec::RunConfig cfg = resolve_config(overrides);
    std::cout << body(cfg) << "\n";
  } catch (const glrec::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: Unhandled: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
