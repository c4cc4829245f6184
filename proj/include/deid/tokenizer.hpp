#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace deid {

struct RawDocument {
  std::string doc_id;
  std::string text;  // UTF-8 clinical free text
};

// A token with its exact character span. Offsets count Unicode scalar
// values into the document text; end is exclusive.
struct Token {
  std::string text;
  std::size_t start_char = 0;
  std::size_t end_char = 0;

  bool operator==(const Token&) const = default;
};

struct TokenizedDocument {
  std::string doc_id;
  std::vector<std::vector<Token>> sentences;
};

// Rule-based medical text tokenizer. Splits on whitespace first, then
// recursively within each chunk: whitelisted abbreviations stay intact,
// punctuation runs become their own tokens, and case or letter/digit
// boundaries split glued words ("SamLee" -> "Sam","Lee"; "70yo" -> "70","yo").
//
// Sentences terminate at a newline or at '.', '?', '!' followed by
// whitespace, except after a whitelisted abbreviation.
class Tokenizer {
 public:
  // Default abbreviation whitelist: Mr., Mrs., Ms., Dr., vs., e.g., i.e.
  Tokenizer();

  // Whitelist file: one abbreviation per line, '#' starts a comment.
  static Tokenizer from_abbreviation_file(const std::string& path);

  void add_abbreviation(const std::string& abbr);

  // Sentence spans in scalar-value offsets, trimmed to non-whitespace,
  // disjoint and ordered. Empty document -> empty list.
  std::vector<std::pair<std::size_t, std::size_t>> split_sentences(
      const RawDocument& doc) const;

  // Tokenize one sentence whose first scalar sits at `sentence_offset` in the
  // enclosing document; spans in the returned tokens are absolute.
  std::vector<Token> tokenize_sentence(const std::string& text,
                                       std::size_t sentence_offset = 0) const;

  TokenizedDocument tokenize(const RawDocument& doc) const;

 private:
  std::vector<Token> tokenize_scalars(const std::u32string& sent,
                                      std::size_t offset) const;
  std::set<std::u32string> abbreviations_;
};

}  // namespace deid
