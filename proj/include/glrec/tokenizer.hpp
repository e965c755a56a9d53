#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "glrec/error.hpp"

namespace glrec {

// Lowercase word/punctuation tokenizer with a frequency-capped vocabulary.
// The four answer labels are reserved atomic tokens so answer parsing needs
// exactly one position.
class Tokenizer {
 public:
  static constexpr int kPad = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;
  static constexpr int kUnk = 3;
  static constexpr int kYes = 4;   // "Yes."
  static constexpr int kNo = 5;    // "No."
  static constexpr int kLabelA = 6;  // "[A]."
  static constexpr int kLabelB = 7;  // "[B]."
  static constexpr int kNumSpecial = 8;

  Tokenizer() = default;

  static Tokenizer fit(const std::vector<std::string>& corpus, int max_vocab);

  std::vector<int> encode(const std::string& text) const;
  std::string decode(const std::vector<int>& ids) const;

  int vocab_size() const { return static_cast<int>(id_to_token_.size()); }
  int token_id(const std::string& token) const;  // kUnk when absent
  const std::string& token_text(int id) const;

  // Lowercased words/punctuation chunks, with label strings kept atomic.
  static std::vector<std::string> pre_tokenize(const std::string& text);

  const std::vector<std::string>& vocab() const { return id_to_token_; }
  void set_vocab(std::vector<std::string> id_to_token);  // for checkpoint load

 private:
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, int> token_to_id_;
};

}  // namespace glrec
