#pragma once

#include <string>

#include "glrec/config.hpp"

namespace glrec {

// Subcommand bodies shared by the CLI and the tests. Each reads/writes under
// cfg.out_dir and returns a one-line human-readable status.

// World generation: profiles/jds/interactions/labels JSONL plus the echoed
// effective config.
std::string cmd_synth(const RunConfig& cfg);

// Tokenizer fit + sample assembly + split: tokenizer.jsonl, train/test
// samples JSONL.
std::string cmd_prepare(const RunConfig& cfg);

// Fine-tunes adapters + selector on the prepared train set: model.ckpt,
// train_log.csv.
std::string cmd_train(const RunConfig& cfg);

// Scores the prepared test set with the trained checkpoint: eval.csv.
std::string cmd_eval(const RunConfig& cfg);

// Path-count ablation and ordering-bias experiment: ablation.csv, bias.csv.
std::string cmd_ablate(const RunConfig& cfg);

// Rebuilds a World from the synth output files in dir.
World load_world(const std::string& dir, const WorldConfig& config);

}  // namespace glrec
