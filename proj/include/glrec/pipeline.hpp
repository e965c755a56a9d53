#pragma once

#include <vector>

#include "glrec/checkpoint.hpp"
#include "glrec/dataset_io.hpp"
#include "glrec/eval.hpp"
#include "glrec/synth.hpp"
#include "glrec/trainer.hpp"

namespace glrec {

struct PrepareConfig {
  Task task = Task::PointWise;
  int path_count = 2;    // M, the per-candidate path budget
  double gamma = 0.8;    // pairwise similarity cap
  int num_walks = 8;     // candidate walks before dedup
  int max_edges = 3;
  AugmentStrategy strategy = AugmentStrategy::None;
  int shuffle_m = 2;
  int max_vocab = 8192;
  uint64_t seed = 1;

  void validate() const;
};

struct PreparedData {
  Tokenizer tokenizer;
  std::vector<PromptSample> train;
  std::vector<PromptSample> test;
};

// Per-candidate diversity-selected meta-path prompts.
std::vector<std::string> candidate_path_prompts(const HeteroGraph& graph, NodeId candidate,
                                                const std::map<NodeId, CandidateProfile>& profiles,
                                                const std::map<NodeId, JobDescription>& jds,
                                                const PrepareConfig& cfg,
                                                const Tokenizer& tokenizer);

// Full dataset assembly: sample + dedup paths, render prompts, fit the
// tokenizer, build samples, split, and materialize augmentation on train.
PreparedData prepare_data(const World& world, const PrepareConfig& prep, const SplitSpec& split,
                          int context_len);

// Fresh model (vocab from the tokenizer) fine-tuned on the prepared train set.
Checkpoint train_model(const PreparedData& data, ModelConfig model_cfg, const TrainConfig& train_cfg);

struct PipelineConfig {
  WorldConfig world;
  ModelConfig model;
  TrainConfig train;
  PrepareConfig prepare;
  SplitSpec split;
};

// Point-wise Random-split AUC per path count; identical seeds across arms.
EvalReport run_path_ablation(const PipelineConfig& cfg, const std::vector<int>& path_counts);

// Trains one checkpoint per strategy on the same data/seed and reports mean
// AUC across path orderings plus mean per-sample ordering std.
EvalReport run_bias_experiment(const PipelineConfig& cfg,
                               const std::vector<AugmentStrategy>& strategies);

}  // namespace glrec
