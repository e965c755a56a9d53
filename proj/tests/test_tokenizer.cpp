#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "glrec/tokenizer.hpp"

using namespace glrec;

TEST_CASE("reserved special tokens occupy ids 0..7") {
  Tokenizer t = Tokenizer::fit({"hello world"}, 64);
  CHECK(t.token_text(Tokenizer::kPad) == "<pad>");
  CHECK(t.token_text(Tokenizer::kBos) == "<bos>");
  CHECK(t.token_text(Tokenizer::kEos) == "<eos>");
  CHECK(t.token_text(Tokenizer::kUnk) == "<unk>");
  CHECK(t.token_text(Tokenizer::kYes) == "yes.");
  CHECK(t.token_text(Tokenizer::kNo) == "no.");
  CHECK(t.token_text(Tokenizer::kLabelA) == "[a].");
  CHECK(t.token_text(Tokenizer::kLabelB) == "[b].");
  CHECK(t.vocab_size() >= Tokenizer::kNumSpecial);
}

TEST_CASE("label strings tokenize atomically") {
  CHECK(Tokenizer::pre_tokenize("Yes.") == std::vector<std::string>{"yes."});
  CHECK(Tokenizer::pre_tokenize("[A].") == std::vector<std::string>{"[a]."});
  CHECK(Tokenizer::pre_tokenize("answer: No.") ==
        std::vector<std::string>{"answer", ":", "no."});
  // "yes" inside a longer word is not a label
  CHECK(Tokenizer::pre_tokenize("yes.terday") != std::vector<std::string>{"yes.", "terday"});
  Tokenizer t = Tokenizer::fit({"x"}, 64);
  CHECK(t.encode("Yes.") == std::vector<int>{Tokenizer::kYes});
  CHECK(t.encode("[B].") == std::vector<int>{Tokenizer::kLabelB});
}

TEST_CASE("fit orders the vocabulary by frequency then first occurrence") {
  Tokenizer t = Tokenizer::fit({"a a b"}, 64);
  const int ida = t.token_id("a");
  const int idb = t.token_id("b");
  CHECK(ida == Tokenizer::kNumSpecial);  // highest frequency right after specials
  CHECK(idb == Tokenizer::kNumSpecial + 1);

  // equal frequency: first occurrence wins
  Tokenizer u = Tokenizer::fit({"zed apple zed apple"}, 64);
  CHECK(u.token_id("zed") < u.token_id("apple"));
}

TEST_CASE("max_vocab caps the learned vocabulary") {
  Tokenizer t = Tokenizer::fit({"a b c d e f g h i j"}, Tokenizer::kNumSpecial + 3);
  CHECK(t.vocab_size() == Tokenizer::kNumSpecial + 3);
  CHECK(t.token_id("j") == Tokenizer::kUnk);
}

TEST_CASE("encode decode round trip") {
  std::vector<std::string> corpus = {
      "Candidate Profile: Age: 25, Skills: parsing/searching",
      "Position Title: analyst, Work Experience: 3 years",
  };
  Tokenizer t = Tokenizer::fit(corpus, 512);
  for (const auto& line : corpus) {
    auto ids = t.encode(line);
    CHECK(std::count(ids.begin(), ids.end(), Tokenizer::kUnk) == 0);
    // round trip modulo whitespace/lowercase normalization
    CHECK(t.encode(t.decode(ids)) == ids);
  }
}

TEST_CASE("unknown words map to kUnk") {
  Tokenizer t = Tokenizer::fit({"known words only"}, 64);
  auto ids = t.encode("entirely novel");
  REQUIRE(ids.size() == 2);
  CHECK(ids[0] == Tokenizer::kUnk);
  CHECK(ids[1] == Tokenizer::kUnk);
}

TEST_CASE("fit is deterministic") {
  std::vector<std::string> corpus = {"b a", "c b a", "d"};
  Tokenizer t = Tokenizer::fit(corpus, 64);
  Tokenizer u = Tokenizer::fit(corpus, 64);
  CHECK(t.vocab() == u.vocab());
}

TEST_CASE("set_vocab restores an identical tokenizer") {
  Tokenizer t = Tokenizer::fit({"alpha beta gamma"}, 64);
  Tokenizer u;
  u.set_vocab(t.vocab());
  CHECK(u.encode("alpha gamma") == t.encode("alpha gamma"));
}
