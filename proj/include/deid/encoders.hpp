#pragma once

#include <string>
#include <vector>

#include "deid/autodiff.hpp"
#include "deid/rng.hpp"

namespace deid {

// One LSTM direction: four gates, each acting on [x_t ; h_{t-1}].
// Weight init uniform [-0.1, 0.1]; biases zero except the forget-gate bias,
// which starts at 1.0.
struct LstmCellParams {
  Parameter w_input, w_forget, w_candidate, w_output;  // (k+h) x h
  Parameter b_input, b_forget, b_candidate, b_output;  // 1 x h
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;

  LstmCellParams() = default;
  LstmCellParams(const std::string& prefix, std::size_t k, std::size_t h,
                 SeededRng& rng);
  std::vector<Parameter*> parameters();
};

// Standard LSTM recurrence: f,i,o sigmoid gates, g = tanh candidate,
// c_t = f*c_prev + i*g, h_t = o*tanh(c_t). x_t, h_prev, c_prev are 1 x dim.
std::pair<ag::Var, ag::Var> lstm_step(ag::Tape& tape, ag::Var x_t,
                                      ag::Var h_prev, ag::Var c_prev,
                                      LstmCellParams& p);

struct BiLstmEncoder {
  LstmCellParams fwd, bwd;

  BiLstmEncoder() = default;
  BiLstmEncoder(const std::string& prefix, std::size_t k, std::size_t h,
                SeededRng& rng);
  // X is len x k (real positions only); output len x 2h, row t is
  // [h_t_forward ; h_t_backward].
  ag::Var encode(ag::Tape& tape, ag::Var x);
  std::vector<Parameter*> parameters();
  std::size_t output_dim() const { return 2 * fwd.hidden_dim; }
};

// Sinusoidal position table: PE[pos, 2i] = sin(pos/10000^(2i/k)),
// PE[pos, 2i+1] = cos(pos/10000^(2i/k)).
struct PositionalEncoding {
  Tensor table;  // m_max x k
  PositionalEncoding() = default;
  PositionalEncoding(std::size_t m_max, std::size_t k);
};

// Scaled dot-product attention. Optional key_mask marks valid keys; masked
// keys get a -inf score before the softmax and zero weight after it.
ag::Var attention(ag::Tape& tape, ag::Var q, ag::Var k, ag::Var v,
                  const std::vector<char>* key_mask = nullptr);

struct TransformerLayer {
  struct Head {
    Parameter w_q, w_k, w_v;  // k x d_k
  };
  std::vector<Head> heads;
  Parameter w_o;              // k x k
  Parameter ff_w1, ff_b1, ff_w2, ff_b2;
  Parameter ln1_gain, ln1_bias, ln2_gain, ln2_bias;
  std::size_t model_dim = 0;

  TransformerLayer() = default;
  TransformerLayer(const std::string& prefix, std::size_t k,
                   std::size_t n_heads, SeededRng& rng);
  ag::Var multi_head_attention(ag::Tape& tape, ag::Var x,
                               const std::vector<char>* key_mask = nullptr);
  // Post-norm block: x + MHA -> LN -> + FF -> LN.
  ag::Var apply(ag::Tape& tape, ag::Var x,
                const std::vector<char>* key_mask = nullptr);
  std::vector<Parameter*> parameters();
};

struct TransformerEncoder {
  PositionalEncoding pe;
  std::vector<TransformerLayer> layers;

  TransformerEncoder() = default;
  TransformerEncoder(const std::string& prefix, std::size_t k,
                     std::size_t n_heads, std::size_t n_layers,
                     std::size_t m_max, SeededRng& rng);
  // X is len x k; len must not exceed the position table.
  ag::Var encode(ag::Tape& tape, ag::Var x);
  std::vector<Parameter*> parameters();
};

}  // namespace deid
