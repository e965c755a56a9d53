#pragma once

#include <string>

#include "glrec/augment.hpp"
#include "glrec/model.hpp"
#include "glrec/tokenizer.hpp"

namespace glrec {

// Everything needed to reproduce inference: config, frozen base weights,
// adapters, selector parameters and the tokenizer vocabulary.
struct Checkpoint {
  ModelConfig config;
  BaseWeights base;
  LoraAdapters adapters;
  SelectorParams selector;
  Tokenizer tokenizer;
};

// Versioned little-endian binary format; writes are atomic (temp + rename).
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace glrec
