#include <doctest.h>

#include <string>
#include <vector>

#include "deid/rng.hpp"
#include "deid/tokenizer.hpp"
#include "deid/utf8.hpp"

using namespace deid;

namespace {

std::vector<std::string> token_texts(const std::vector<Token>& toks) {
  std::vector<std::string> out;
  for (const auto& t : toks) out.push_back(t.text);
  return out;
}

std::vector<std::string> flat_tokens(const TokenizedDocument& doc) {
  std::vector<std::string> out;
  for (const auto& s : doc.sentences)
    for (const auto& t : s) out.push_back(t.text);
  return out;
}

}  // namespace

TEST_CASE("glued words split on case and letter/digit boundaries") {
  Tokenizer tok;
  const TokenizedDocument doc =
      tok.tokenize({"ex", "Mr. SamLee is a 70yo man"});
  CHECK(flat_tokens(doc) == std::vector<std::string>{"Mr.", "Sam", "Lee",
                                                     "is", "a", "70", "yo",
                                                     "man"});
  CHECK(doc.sentences.size() == 1);
}

TEST_CASE("token spans index the original text exactly") {
  Tokenizer tok;
  const RawDocument raw{"ex", "Mr. SamLee is a 70yo man"};
  const std::u32string scalars = utf8_decode(raw.text);
  for (const auto& sent : tok.tokenize(raw).sentences)
    for (const auto& t : sent) {
      REQUIRE(t.start_char < t.end_char);
      REQUIRE(t.end_char <= scalars.size());
      CHECK(utf8_encode(scalars.substr(t.start_char,
                                       t.end_char - t.start_char)) == t.text);
    }
}

TEST_CASE("abbreviations survive both tokenization and sentence splitting") {
  Tokenizer tok;
  const TokenizedDocument doc =
      tok.tokenize({"d", "Dr. Smith saw Mrs. Jones. She left."});
  REQUIRE(doc.sentences.size() == 2);
  CHECK(token_texts(doc.sentences[0]) ==
        std::vector<std::string>{"Dr.", "Smith", "saw", "Mrs.", "Jones", "."});
  CHECK(token_texts(doc.sentences[1]) ==
        std::vector<std::string>{"She", "left", "."});
}

TEST_CASE("newlines terminate sentences") {
  Tokenizer tok;
  const TokenizedDocument doc = tok.tokenize({"d", "line one\nline two"});
  REQUIRE(doc.sentences.size() == 2);
  CHECK(token_texts(doc.sentences[1]) ==
        std::vector<std::string>{"line", "two"});
}

TEST_CASE("punctuation runs become standalone tokens") {
  Tokenizer tok;
  CHECK(token_texts(tok.tokenize_sentence("a,b--c")) ==
        std::vector<std::string>{"a", ",", "b", "--", "c"});
  CHECK(token_texts(tok.tokenize_sentence("(x)")) ==
        std::vector<std::string>{"(", "x", ")"});
}

TEST_CASE("question and exclamation marks end sentences") {
  Tokenizer tok;
  const TokenizedDocument doc = tok.tokenize({"d", "Really? Yes! Fine."});
  CHECK(doc.sentences.size() == 3);
}

TEST_CASE("empty and whitespace-only documents tokenize to nothing") {
  Tokenizer tok;
  CHECK(tok.tokenize({"d", ""}).sentences.empty());
  CHECK(tok.tokenize({"d", "  \n\t "}).sentences.empty());
}

TEST_CASE("non-ascii text keeps scalar-value offsets") {
  Tokenizer tok;
  // 'é' is one scalar but two UTF-8 bytes; offsets must count scalars.
  const RawDocument raw{"d", "José was here"};
  const auto doc = tok.tokenize(raw);
  const std::u32string scalars = utf8_decode(raw.text);
  REQUIRE(doc.sentences.size() == 1);
  const Token& first = doc.sentences[0][0];
  CHECK(first.text == "José");
  CHECK(first.start_char == 0);
  CHECK(first.end_char == 4);
  CHECK(utf8_encode(scalars.substr(0, 4)) == "José");
}

TEST_CASE("fuzz: every non-whitespace scalar lands in exactly one token") {
  const Tokenizer tok;
  SeededRng rng(91);
  const std::string alphabet = "abXY09.,?! \n-";
  for (int trial = 0; trial < 1000; ++trial) {
    std::string text;
    const std::size_t len = rng.index(60);
    for (std::size_t i = 0; i < len; ++i)
      text += alphabet[rng.index(alphabet.size())];
    const RawDocument raw{"fuzz", text};
    const std::u32string scalars = utf8_decode(text);
    std::vector<int> covered(scalars.size(), 0);
    for (const auto& sent : tok.tokenize(raw).sentences)
      for (const auto& t : sent) {
        REQUIRE(t.start_char < t.end_char);
        REQUIRE(t.end_char <= scalars.size());
        CHECK(utf8_encode(scalars.substr(
                  t.start_char, t.end_char - t.start_char)) == t.text);
        for (std::size_t i = t.start_char; i < t.end_char; ++i) ++covered[i];
      }
    for (std::size_t i = 0; i < scalars.size(); ++i) {
      const bool ws = scalars[i] == U' ' || scalars[i] == U'\n' ||
                      scalars[i] == U'\t' || scalars[i] == U'\r';
      CHECK(covered[i] == (ws ? 0 : 1));
    }
  }
}

TEST_CASE("custom abbreviation whitelist") {
  Tokenizer tok;
  tok.add_abbreviation("approx.");
  const auto doc = tok.tokenize({"d", "approx. ten units. done"});
  REQUIRE(doc.sentences.size() == 2);
  CHECK(token_texts(doc.sentences[0])[0] == "approx.");
}
