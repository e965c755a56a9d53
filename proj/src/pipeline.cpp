#include "glrec/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "glrec/error.hpp"
#include "glrec/rng.hpp"

namespace glrec {

void PrepareConfig::validate() const {
  if (gamma < 0.0 || gamma > 1.0)
    throw Error("InvalidConfig", "gamma must lie in [0,1], got " + std::to_string(gamma));
  if (path_count < 0) throw Error("InvalidConfig", "path count must be >= 0");
  if (num_walks < 0 || max_edges < 1)
    throw Error("InvalidConfig", "num_walks must be >= 0 and max_edges >= 1");
  if (shuffle_m < 1) throw Error("InvalidConfig", "shuffle m must be >= 1");
}

std::vector<std::string> candidate_path_prompts(const HeteroGraph& graph, NodeId candidate,
                                                const std::map<NodeId, CandidateProfile>& profiles,
                                                const std::map<NodeId, JobDescription>& jds,
                                                const PrepareConfig& cfg,
                                                const Tokenizer& tokenizer) {
  if (cfg.path_count == 0 || cfg.num_walks == 0) return {};
  auto walks = sample_meta_paths(graph, candidate, cfg.max_edges, cfg.num_walks,
                                 cfg.seed ^ (0x5157ULL + candidate * 0x9e3779b97f4a7c15ULL));
  for (auto& w : walks) {
    w.prompt_text = render_meta_path_prompt(w, profiles, jds);
    auto ids = tokenizer.encode(w.prompt_text);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    w.tokens = std::move(ids);
  }
  auto kept = select_diverse_paths(walks, cfg.gamma, cfg.path_count);
  std::vector<std::string> prompts;
  for (const auto& k : kept) prompts.push_back(k.prompt_text);
  return prompts;
}

PreparedData prepare_data(const World& world, const PrepareConfig& prep, const SplitSpec& split,
                          int context_len) {
  prep.validate();

  // Tokenizer corpus: every rendered text the pipeline can produce.
  std::vector<std::string> corpus;
  corpus.push_back(pointwise_instruction());
  corpus.push_back(pairwise_instruction());
  corpus.push_back("Candidate Profile: JD: Option A: Option B:");
  PhraseRegistry phrases;
  for (EdgeKind k : {EdgeKind::Message, EdgeKind::Interview, EdgeKind::Match, EdgeKind::Browse})
    corpus.push_back(phrases.phrase(k));
  corpus.push_back("This position This job seeker");
  for (const auto& [_, p] : world.profiles) {
    corpus.push_back(render_profile_text(p));
    corpus.push_back(p.summary);
  }
  for (const auto& [_, jd] : world.jds) {
    corpus.push_back(render_jd_text(jd));
    corpus.push_back(jd.summary);
  }

  PreparedData data;
  data.tokenizer = Tokenizer::fit(corpus, prep.max_vocab);

  // Paths are sampled once per candidate and shared across that candidate's
  // samples.
  std::map<NodeId, std::vector<std::string>> paths;
  for (NodeId c : world.candidates)
    paths[c] =
        candidate_path_prompts(world.graph, c, world.profiles, world.jds, prep, data.tokenizer);

  std::vector<PromptSample> all;
  if (prep.task == Task::PointWise) {
    for (const auto& lp : make_pointwise_dataset(world)) {
      auto s = build_pointwise_sample(world.profiles.at(lp.candidate), world.jds.at(lp.job),
                                      paths.at(lp.candidate), lp.label ? "Yes" : "No",
                                      data.tokenizer, context_len);
      s.sample_id = static_cast<int64_t>(all.size());
      all.push_back(std::move(s));
    }
  } else {
    for (const auto& tr : make_pairwise_dataset(world)) {
      auto s = build_pairwise_sample(world.profiles.at(tr.candidate), world.jds.at(tr.job_a),
                                     world.jds.at(tr.job_b), paths.at(tr.candidate), tr.label,
                                     data.tokenizer, context_len);
      s.sample_id = static_cast<int64_t>(all.size());
      all.push_back(std::move(s));
    }
  }

  auto [train, test] = split_dataset(all, split);

  // Materialize augmentation on the train side; selector-based strategies
  // also flag the test side so inference applies the trained selector.
  std::vector<PromptSample> aug_train;
  for (const auto& s : train) {
    auto outs = augment(s, prep.strategy, prep.shuffle_m,
                        prep.seed ^ (0x40d0ULL + static_cast<uint64_t>(s.sample_id) * 31ULL),
                        data.tokenizer, context_len);
    for (auto& o : outs) aug_train.push_back(std::move(o));
  }
  if (prep.strategy == AugmentStrategy::SoftSelector || prep.strategy == AugmentStrategy::Hybrid)
    for (auto& s : test) s.use_selector = true;

  data.train = std::move(aug_train);
  data.test = std::move(test);
  return data;
}

Checkpoint train_model(const PreparedData& data, ModelConfig model_cfg,
                       const TrainConfig& train_cfg) {
  model_cfg.vocab_size = data.tokenizer.vocab_size();
  model_cfg.validate();
  Checkpoint ckpt;
  ckpt.config = model_cfg;
  ckpt.base = init_base_weights(model_cfg);
  ckpt.adapters = init_lora_adapters(model_cfg);
  ckpt.selector = SelectorParams(model_cfg.d_e, train_cfg.lambda);
  ckpt.tokenizer = data.tokenizer;
  fine_tune(data.train, ckpt, train_cfg);
  return ckpt;
}

EvalReport run_path_ablation(const PipelineConfig& cfg, const std::vector<int>& path_counts) {
  World world = generate_world(cfg.world);
  EvalReport report;
  for (int count : path_counts) {
    PrepareConfig prep = cfg.prepare;
    prep.path_count = count;
    prep.strategy = AugmentStrategy::None;
    prep.task = Task::PointWise;
    SplitSpec split = cfg.split;
    split.kind = SplitKind::Random;
    PreparedData data = prepare_data(world, prep, split, cfg.model.context_len);
    Checkpoint ckpt = train_model(data, cfg.model, cfg.train);
    EvalRow row;
    row.task = "pointwise";
    row.split = "random";
    row.strategy = "none";
    row.path_count = count;
    row.auc = evaluate_auc(ckpt, data.test);
    row.samples = data.test.size();
    report.rows.push_back(row);
  }
  return report;
}

EvalReport run_bias_experiment(const PipelineConfig& cfg,
                               const std::vector<AugmentStrategy>& strategies) {
  World world = generate_world(cfg.world);
  EvalReport report;
  for (AugmentStrategy strategy : strategies) {
    PrepareConfig prep = cfg.prepare;
    prep.strategy = strategy;
    prep.task = Task::PointWise;
    SplitSpec split = cfg.split;
    split.kind = SplitKind::Random;
    PreparedData data = prepare_data(world, prep, split, cfg.model.context_len);
    // Equal optimization budget across arms: shuffle-style augmentation
    // multiplies the train set, so scale epochs down by that factor.
    std::set<int64_t> distinct;
    for (const auto& s : data.train) distinct.insert(s.sample_id);
    TrainConfig train = cfg.train;
    if (!distinct.empty())
      train.epochs = std::max(
          1, (int)std::lround(double(train.epochs) * double(distinct.size()) /
                              double(data.train.size())));
    Checkpoint ckpt = train_model(data, cfg.model, train);
    BiasStats stats = evaluate_orderings(ckpt, data.test, cfg.model.context_len);
    EvalRow row;
    row.task = "pointwise";
    row.split = "random";
    row.strategy = to_string(strategy);
    row.path_count = cfg.prepare.path_count;
    row.auc = stats.mean_auc;
    row.samples = data.test.size();
    row.mean_ordering_std = stats.mean_ordering_std;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace glrec
