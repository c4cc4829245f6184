#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "deid/bio.hpp"
#include "deid/tokenizer.hpp"

namespace deid {

// Token and character id spaces built from training data only. Ids are dense
// and 0-based with PAD=0 and UNK=1 always present; everything unseen encodes
// to UNK.
struct Vocabulary {
  static constexpr int kPadId = 0;
  static constexpr int kUnkId = 1;

  std::vector<std::string> tokens;  // index == id; [0]=<PAD>, [1]=<UNK>
  std::unordered_map<std::string, int> token_to_id;
  std::vector<char32_t> chars;  // index == id; [0]=PAD, [1]=UNK
  std::unordered_map<char32_t, int> char_to_id;

  int id(const std::string& token) const;
  int char_id(char32_t c) const;
  std::size_t size() const { return tokens.size(); }
  std::size_t char_size() const { return chars.size(); }
};

// Tokens with frequency >= min_count get ids, in first-occurrence order.
// The character alphabet keeps every character seen in training.
Vocabulary build_vocabulary(const std::vector<TokenizedDocument>& train_docs,
                            int min_count = 1);

// One padded training instance.
struct EncodedSentence {
  std::vector<int> token_ids;             // length m
  std::vector<std::vector<int>> char_ids;  // m rows of c_max ids
  std::vector<int> label_ids;             // length m; O at padded positions
  std::vector<char> mask;                 // prefix of 1s, then 0s
  std::vector<Token> tokens;              // the real tokens (length <= m)

  std::size_t true_length() const { return tokens.size(); }
};

// Requires tokens.size() <= m; labels and tokens same length.
EncodedSentence encode_sentence(const std::vector<Token>& tokens,
                                const std::vector<std::string>& labels,
                                const Vocabulary& vocab,
                                const LabelSet& label_set, std::size_t m,
                                std::size_t c_max);

// Splits sentences longer than m into consecutive windows of length m, so no
// token is ever dropped.
std::vector<EncodedSentence> encode_windows(
    const std::vector<Token>& tokens, const std::vector<std::string>& labels,
    const Vocabulary& vocab, const LabelSet& label_set, std::size_t m,
    std::size_t c_max);

}  // namespace deid
