#include "deid/vocab.hpp"

#include <stdexcept>

#include "deid/utf8.hpp"

namespace deid {

int Vocabulary::id(const std::string& token) const {
  auto it = token_to_id.find(token);
  return it == token_to_id.end() ? kUnkId : it->second;
}

int Vocabulary::char_id(char32_t c) const {
  auto it = char_to_id.find(c);
  return it == char_to_id.end() ? kUnkId : it->second;
}

Vocabulary build_vocabulary(const std::vector<TokenizedDocument>& train_docs,
                            int min_count) {
  if (min_count < 1)
    throw std::invalid_argument("build_vocabulary: min_count must be >= 1");

  Vocabulary v;
  v.tokens = {"<PAD>", "<UNK>"};
  v.chars = {0, 0xFFFF};  // placeholder scalar values for PAD/UNK slots

  std::unordered_map<std::string, int> counts;
  std::vector<std::string> order;
  std::vector<char32_t> char_order;
  std::unordered_map<char32_t, bool> char_seen;
  for (const auto& doc : train_docs)
    for (const auto& sent : doc.sentences)
      for (const auto& tok : sent) {
        if (counts[tok.text]++ == 0) order.push_back(tok.text);
        for (char32_t c : utf8_decode(tok.text))
          if (!char_seen[c]) {
            char_seen[c] = true;
            char_order.push_back(c);
          }
      }

  for (const auto& t : order)
    if (counts[t] >= min_count) {
      v.token_to_id[t] = static_cast<int>(v.tokens.size());
      v.tokens.push_back(t);
    }
  for (char32_t c : char_order) {
    v.char_to_id[c] = static_cast<int>(v.chars.size());
    v.chars.push_back(c);
  }
  return v;
}

EncodedSentence encode_sentence(const std::vector<Token>& tokens,
                                const std::vector<std::string>& labels,
                                const Vocabulary& vocab,
                                const LabelSet& label_set, std::size_t m,
                                std::size_t c_max) {
  if (tokens.size() != labels.size())
    throw std::invalid_argument("encode_sentence: " +
                                std::to_string(labels.size()) + " labels for " +
                                std::to_string(tokens.size()) + " tokens");
  if (tokens.size() > m)
    throw std::invalid_argument("encode_sentence: sentence length " +
                                std::to_string(tokens.size()) +
                                " exceeds window " + std::to_string(m));

  EncodedSentence e;
  e.tokens = tokens;
  e.token_ids.assign(m, Vocabulary::kPadId);
  e.label_ids.assign(m, label_set.o_id());
  e.mask.assign(m, 0);
  e.char_ids.assign(m, std::vector<int>(c_max, Vocabulary::kPadId));
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    e.token_ids[i] = vocab.id(tokens[i].text);
    e.label_ids[i] = label_set.id(labels[i]);
    e.mask[i] = 1;
    const std::u32string cs = utf8_decode(tokens[i].text);
    for (std::size_t j = 0; j < cs.size() && j < c_max; ++j)
      e.char_ids[i][j] = vocab.char_id(cs[j]);
  }
  return e;
}

std::vector<EncodedSentence> encode_windows(
    const std::vector<Token>& tokens, const std::vector<std::string>& labels,
    const Vocabulary& vocab, const LabelSet& label_set, std::size_t m,
    std::size_t c_max) {
  std::vector<EncodedSentence> out;
  for (std::size_t start = 0; start < tokens.size(); start += m) {
    const std::size_t len = std::min(m, tokens.size() - start);
    out.push_back(encode_sentence(
        {tokens.begin() + start, tokens.begin() + start + len},
        {labels.begin() + start, labels.begin() + start + len}, vocab,
        label_set, m, c_max));
  }
  return out;
}

}  // namespace deid
