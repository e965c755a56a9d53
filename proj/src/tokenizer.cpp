#include "glrec/tokenizer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstring>

namespace glrec {

namespace {

constexpr std::array<const char*, Tokenizer::kNumSpecial> kSpecialText = {
    "<pad>", "<bos>", "<eos>", "<unk>", "yes.", "no.", "[a].", "[b].",
};

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '\'';
}

}  // namespace

std::vector<std::string> Tokenizer::pre_tokenize(const std::string& text) {
  std::string lower;
  lower.reserve(text.size());
  for (char c : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));

  std::vector<std::string> out;
  size_t i = 0;
  while (i < lower.size()) {
    const char c = lower[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    bool matched_special = false;
    for (const char* sp : kSpecialText) {
      const size_t n = std::strlen(sp);
      if (lower.compare(i, n, sp) == 0) {
        // Label and sentinel strings are atomic only at chunk boundaries:
        // "yes." matches, "eyes." and "yes.terday" do not.
        const bool left_ok = i == 0 || !is_word_char(lower[i - 1]) || !is_word_char(sp[0]);
        const bool right_ok = i + n == lower.size() || !is_word_char(lower[i + n]);
        if (left_ok && right_ok) {
          out.emplace_back(sp);
          i += n;
          matched_special = true;
          break;
        }
      }
    }
    if (matched_special) continue;
    if (is_word_char(c)) {
      size_t j = i;
      while (j < lower.size() && is_word_char(lower[j])) ++j;
      out.push_back(lower.substr(i, j - i));
      i = j;
    } else {
      out.push_back(std::string(1, c));
      ++i;
    }
  }
  return out;
}

Tokenizer Tokenizer::fit(const std::vector<std::string>& corpus, int max_vocab) {
  if (corpus.empty()) throw Error("EmptyCorpus", "tokenizer needs a nonempty corpus");
  std::unordered_map<std::string, int64_t> freq;
  std::unordered_map<std::string, int64_t> first_seen;
  int64_t pos = 0;
  for (const auto& line : corpus) {
    for (auto& tok : pre_tokenize(line)) {
      auto [it, inserted] = freq.try_emplace(tok, 0);
      it->second += 1;
      if (inserted) first_seen[tok] = pos;
      ++pos;
    }
  }

  std::vector<std::string> words;
  words.reserve(freq.size());
  for (const auto& [tok, _] : freq) {
    if (std::find(kSpecialText.begin(), kSpecialText.end(), tok) == kSpecialText.end())
      words.push_back(tok);
  }
  std::sort(words.begin(), words.end(), [&](const std::string& a, const std::string& b) {
    if (freq[a] != freq[b]) return freq[a] > freq[b];
    return first_seen[a] < first_seen[b];
  });
  const int budget = std::max(0, max_vocab - kNumSpecial);
  if (static_cast<int>(words.size()) > budget) words.resize(budget);

  Tokenizer t;
  std::vector<std::string> vocab(kSpecialText.begin(), kSpecialText.end());
  vocab.insert(vocab.end(), words.begin(), words.end());
  t.set_vocab(std::move(vocab));
  return t;
}

void Tokenizer::set_vocab(std::vector<std::string> id_to_token) {
  id_to_token_ = std::move(id_to_token);
  token_to_id_.clear();
  for (int i = 0; i < static_cast<int>(id_to_token_.size()); ++i)
    token_to_id_[id_to_token_[i]] = i;
}

int Tokenizer::token_id(const std::string& token) const {
  auto it = token_to_id_.find(token);
  return it == token_to_id_.end() ? kUnk : it->second;
}

const std::string& Tokenizer::token_text(int id) const {
  if (id < 0 || id >= static_cast<int>(id_to_token_.size()))
    throw Error("UnknownToken", "token id " + std::to_string(id) + " out of range");
  return id_to_token_[id];
}

std::vector<int> Tokenizer::encode(const std::string& text) const {
  std::vector<int> ids;
  for (const auto& tok : pre_tokenize(text)) ids.push_back(token_id(tok));
  return ids;
}

std::string Tokenizer::decode(const std::vector<int>& ids) const {
  std::string out;
  for (int id : ids) {
    if (!out.empty()) out.push_back(' ');
    out += token_text(id);
  }
  return out;
}

}  // namespace glrec
