#pragma once

#include <vector>

#include "deid/autodiff.hpp"
#include "deid/encoders.hpp"
#include "deid/rng.hpp"
#include "deid/vocab.hpp"

namespace deid {

// Learned token-level vectors in R^d. Row 0 is PAD: all-zero and held at
// zero throughout training (its gradient is cleared before each step).
struct TokenEmbeddingTable {
  Parameter table;  // |V| x d
  std::size_t dim = 0;

  TokenEmbeddingTable() = default;
  TokenEmbeddingTable(std::size_t vocab_size, std::size_t d, SeededRng& rng);

  // Rows of the table selected by id; throws on out-of-range ids.
  ag::Var embed(ag::Tape& tape, const std::vector<int>& token_ids);
};

// Character-level encoder: per-token char BiLSTM whose final forward and
// backward hidden states are concatenated and projected to R^50. Set
// `frozen` to keep its parameters fixed during training (emulates a static
// pretrained embedder).
struct CharEncoder {
  static constexpr std::size_t kOutputDim = 50;

  Parameter char_table;  // |C| x d_char
  LstmCellParams fwd, bwd;
  Parameter proj_w;  // 2*hidden x 50
  Parameter proj_b;  // 1 x 50
  std::size_t char_dim = 0;
  std::size_t hidden_dim = 0;

  CharEncoder() = default;
  CharEncoder(std::size_t alphabet_size, std::size_t d_char,
              std::size_t hidden, SeededRng& rng);

  // char_ids: one row of c_max ids per token (PAD-padded). Output len x 50;
  // all-PAD rows come out zero.
  ag::Var encode(ag::Tape& tape,
                 const std::vector<std::vector<int>>& char_ids,
                 std::size_t len);

  std::vector<Parameter*> parameters();
  void set_frozen(bool frozen);
};

// The distributed representation: token vectors, optionally concatenated
// with the 50-dim character channel.
ag::Var represent(ag::Tape& tape, TokenEmbeddingTable& tokens,
                  CharEncoder* chars, const EncodedSentence& sentence);

}  // namespace deid
