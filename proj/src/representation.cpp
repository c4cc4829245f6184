#include "deid/representation.hpp"

#include <stdexcept>

namespace deid {

TokenEmbeddingTable::TokenEmbeddingTable(std::size_t vocab_size, std::size_t d,
                                         SeededRng& rng)
    : dim(d) {
  Tensor t({vocab_size, d});
  for (std::size_t i = d; i < t.size(); ++i)  // row 0 (PAD) stays zero
    t[i] = rng.uniform(-0.1, 0.1);
  table = Parameter("embed.table", std::move(t));
}

ag::Var TokenEmbeddingTable::embed(ag::Tape& tape,
                                   const std::vector<int>& token_ids) {
  std::vector<std::size_t> idx;
  idx.reserve(token_ids.size());
  for (int id : token_ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= table.value.rows())
      throw std::out_of_range("embed_tokens: id " + std::to_string(id) +
                              " outside vocabulary of size " +
                              std::to_string(table.value.rows()));
    idx.push_back(static_cast<std::size_t>(id));
  }
  return ag::gather_rows(tape.leaf(table), std::move(idx));
}

CharEncoder::CharEncoder(std::size_t alphabet_size, std::size_t d_char,
                         std::size_t hidden, SeededRng& rng)
    : fwd("char.fwd", d_char, hidden, rng),
      bwd("char.bwd", d_char, hidden, rng),
      char_dim(d_char),
      hidden_dim(hidden) {
  Tensor t({alphabet_size, d_char});
  for (std::size_t i = d_char; i < t.size(); ++i)
    t[i] = rng.uniform(-0.1, 0.1);
  char_table = Parameter("char.table", std::move(t));
  Tensor pw({2 * hidden, kOutputDim});
  for (std::size_t i = 0; i < pw.size(); ++i) pw[i] = rng.uniform(-0.1, 0.1);
  proj_w = Parameter("char.proj_w", std::move(pw));
  proj_b = Parameter("char.proj_b", Tensor::zeros({1, kOutputDim}));
}

ag::Var CharEncoder::encode(ag::Tape& tape,
                            const std::vector<std::vector<int>>& char_ids,
                            std::size_t len) {
  using namespace ag;
  std::vector<Var> rows;
  rows.reserve(len);
  Var zero_row = tape.constant(Tensor::zeros({1, kOutputDim}));
  for (std::size_t t = 0; t < len; ++t) {
    std::vector<std::size_t> ids;
    for (int id : char_ids[t]) {
      if (id == Vocabulary::kPadId) break;  // chars are a padded prefix
      if (id < 0 || static_cast<std::size_t>(id) >= char_table.value.rows())
        throw std::out_of_range("embed_chars: id " + std::to_string(id) +
                                " outside alphabet of size " +
                                std::to_string(char_table.value.rows()));
      ids.push_back(static_cast<std::size_t>(id));
    }
    if (ids.empty()) {
      rows.push_back(zero_row);
      continue;
    }
    Var x = gather_rows(tape.leaf(char_table), ids);
    Var h0 = tape.constant(Tensor::zeros({1, hidden_dim}));
    Var c0 = tape.constant(Tensor::zeros({1, hidden_dim}));
    Var hf = h0, cf = c0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      auto [nh, nc] = lstm_step(tape, slice_rows(x, i, 1), hf, cf, fwd);
      hf = nh;
      cf = nc;
    }
    Var hb = h0, cb = c0;
    for (std::size_t i = ids.size(); i-- > 0;) {
      auto [nh, nc] = lstm_step(tape, slice_rows(x, i, 1), hb, cb, bwd);
      hb = nh;
      cb = nc;
    }
    rows.push_back(add(matmul(concat(hf, hb, 1), tape.leaf(proj_w)),
                       tape.leaf(proj_b)));
  }
  return stack_rows(rows);
}

std::vector<Parameter*> CharEncoder::parameters() {
  std::vector<Parameter*> out = {&char_table, &proj_w, &proj_b};
  for (auto* p : fwd.parameters()) out.push_back(p);
  for (auto* p : bwd.parameters()) out.push_back(p);
  return out;
}

void CharEncoder::set_frozen(bool frozen) {
  for (Parameter* p : parameters()) p->frozen = frozen;
}

ag::Var represent(ag::Tape& tape, TokenEmbeddingTable& tokens,
                  CharEncoder* chars, const EncodedSentence& sentence) {
  const std::size_t len = sentence.true_length();
  std::vector<int> ids(sentence.token_ids.begin(),
                       sentence.token_ids.begin() + len);
  ag::Var tok = tokens.embed(tape, ids);
  if (chars == nullptr) return tok;
  return ag::concat(tok, chars->encode(tape, sentence.char_ids, len), 1);
}

}  // namespace deid
