#include "deid/tokenizer.hpp"

#include <fstream>
#include <stdexcept>

#include "deid/utf8.hpp"

namespace deid {

namespace {

bool is_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' ||
         c == U'\v';
}
bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }
bool is_alpha(char32_t c) {
  return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') || c >= 0x80;
}
bool is_word(char32_t c) { return is_alpha(c) || is_digit(c); }
bool is_lower(char32_t c) { return c >= U'a' && c <= U'z'; }
bool is_upper(char32_t c) { return c >= U'A' && c <= U'Z'; }

}  // namespace

Tokenizer::Tokenizer() {
  for (const char* a : {"Mr.", "Mrs.", "Ms.", "Dr.", "vs.", "e.g.", "i.e."})
    add_abbreviation(a);
}

Tokenizer Tokenizer::from_abbreviation_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("Tokenizer: cannot open abbreviation file " +
                             path);
  Tokenizer tok;
  tok.abbreviations_.clear();
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t' ||
                             line.back() == '\r'))
      line.pop_back();
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    tok.add_abbreviation(line.substr(first));
  }
  return tok;
}

void Tokenizer::add_abbreviation(const std::string& abbr) {
  abbreviations_.insert(utf8_decode(abbr));
}

std::vector<std::pair<std::size_t, std::size_t>> Tokenizer::split_sentences(
    const RawDocument& doc) const {
  const std::u32string text = utf8_decode(doc.text);
  const std::size_t n = text.size();
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  std::size_t start = std::u32string::npos;
  std::size_t last_nonspace = 0;

  auto close = [&](std::size_t end) {
    if (start != std::u32string::npos && end > start) {
      spans.emplace_back(start, end);
      start = std::u32string::npos;
    }
  };

  for (std::size_t i = 0; i < n; ++i) {
    const char32_t c = text[i];
    if (is_space(c)) {
      if (c == U'\n') close(last_nonspace + 1);
      continue;
    }
    if (start == std::u32string::npos) start = i;
    last_nonspace = i;
    if ((c == U'.' || c == U'?' || c == U'!') &&
        (i + 1 == n || is_space(text[i + 1]))) {
      if (c == U'.') {
        std::size_t cs = i;
        while (cs > 0 && !is_space(text[cs - 1])) --cs;
        if (abbreviations_.count(text.substr(cs, i + 1 - cs))) continue;
      }
      close(i + 1);
    }
  }
  close(last_nonspace + 1);
  return spans;
}

namespace {

void emit_chunk(const std::u32string& s, std::size_t b, std::size_t e,
                std::size_t offset, const std::set<std::u32string>& abbrevs,
                std::vector<Token>& out) {
  auto push = [&](std::size_t pb, std::size_t pe) {
    out.push_back(Token{utf8_encode(std::u32string_view(s).substr(pb, pe - pb)),
                        offset + pb, offset + pe});
  };

  if (abbrevs.count(s.substr(b, e - b))) {
    push(b, e);
    return;
  }

  // Punctuation boundaries: word runs recurse, punctuation runs are tokens.
  bool mixed = false;
  for (std::size_t i = b; i < e; ++i)
    if (!is_word(s[i])) {
      mixed = true;
      break;
    }
  if (mixed && !(e - b == 1)) {
    std::size_t rb = b;
    while (rb < e) {
      const bool word = is_word(s[rb]);
      std::size_t re = rb;
      while (re < e && is_word(s[re]) == word) ++re;
      if (word)
        emit_chunk(s, rb, re, offset, abbrevs, out);
      else
        push(rb, re);
      rb = re;
    }
    return;
  }
  if (mixed) {  // single punctuation scalar
    push(b, e);
    return;
  }

  // Lowercase -> uppercase boundary.
  for (std::size_t i = b + 1; i < e; ++i)
    if (is_lower(s[i - 1]) && is_upper(s[i])) {
      emit_chunk(s, b, i, offset, abbrevs, out);
      emit_chunk(s, i, e, offset, abbrevs, out);
      return;
    }

  // Letter <-> digit boundary, both directions.
  for (std::size_t i = b + 1; i < e; ++i)
    if ((is_alpha(s[i - 1]) && is_digit(s[i])) ||
        (is_digit(s[i - 1]) && is_alpha(s[i]))) {
      emit_chunk(s, b, i, offset, abbrevs, out);
      emit_chunk(s, i, e, offset, abbrevs, out);
      return;
    }

  push(b, e);
}

}  // namespace

std::vector<Token> Tokenizer::tokenize_scalars(const std::u32string& sent,
                                               std::size_t offset) const {
  std::vector<Token> out;
  const std::size_t n = sent.size();
  std::size_t i = 0;
  while (i < n) {
    while (i < n && is_space(sent[i])) ++i;
    if (i >= n) break;
    std::size_t j = i;
    while (j < n && !is_space(sent[j])) ++j;
    emit_chunk(sent, i, j, offset, abbreviations_, out);
    i = j;
  }
  return out;
}

std::vector<Token> Tokenizer::tokenize_sentence(
    const std::string& text, std::size_t sentence_offset) const {
  return tokenize_scalars(utf8_decode(text), sentence_offset);
}

TokenizedDocument Tokenizer::tokenize(const RawDocument& doc) const {
  const std::u32string text = utf8_decode(doc.text);
  TokenizedDocument out;
  out.doc_id = doc.doc_id;
  for (auto [b, e] : split_sentences(doc))
    out.sentences.push_back(tokenize_scalars(text.substr(b, e - b), b));
  return out;
}

}  // namespace deid
