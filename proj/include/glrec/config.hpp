#pragma once

#include <string>

#include "glrec/pipeline.hpp"

namespace glrec {

// Merged configuration for all subcommands. Parsed from one JSON file;
// unknown keys are rejected; CLI flags override individual fields.
struct RunConfig {
  uint64_t seed = 1;
  std::string out_dir = "out";
  PipelineConfig pipeline;

  void validate() const;
  // Propagates the top-level seed into every sub-config that has one.
  void apply_seed();
};

RunConfig default_run_config();
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);
std::string run_config_to_json(const RunConfig& cfg);

}  // namespace glrec
