#include "deid/encoders.hpp"

#include <cmath>
#include <stdexcept>

namespace deid {

namespace {

Tensor uniform_init(std::vector<std::size_t> shape, SeededRng& rng,
                    double bound = 0.1) {
  Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i)
    t[i] = rng.uniform(-bound, bound);
  return t;
}

}  // namespace

LstmCellParams::LstmCellParams(const std::string& prefix, std::size_t k,
                               std::size_t h, SeededRng& rng)
    : w_input(prefix + ".w_input", uniform_init({k + h, h}, rng)),
      w_forget(prefix + ".w_forget", uniform_init({k + h, h}, rng)),
      w_candidate(prefix + ".w_candidate", uniform_init({k + h, h}, rng)),
      w_output(prefix + ".w_output", uniform_init({k + h, h}, rng)),
      b_input(prefix + ".b_input", Tensor::zeros({1, h})),
      b_forget(prefix + ".b_forget", Tensor::zeros({1, h})),
      b_candidate(prefix + ".b_candidate", Tensor::zeros({1, h})),
      b_output(prefix + ".b_output", Tensor::zeros({1, h})),
      input_dim(k),
      hidden_dim(h) {
  b_forget.value.fill(1.0);
}

std::vector<Parameter*> LstmCellParams::parameters() {
  return {&w_input, &w_forget, &w_candidate, &w_output,
          &b_input, &b_forget, &b_candidate, &b_output};
}

std::pair<ag::Var, ag::Var> lstm_step(ag::Tape& tape, ag::Var x_t,
                                      ag::Var h_prev, ag::Var c_prev,
                                      LstmCellParams& p) {
  using namespace ag;
  if (x_t.cols() != p.input_dim || h_prev.cols() != p.hidden_dim)
    throw std::invalid_argument(
        "lstm_step: input " + x_t.value().shape_str() + " / hidden " +
        h_prev.value().shape_str() + " inconsistent with cell dims (" +
        std::to_string(p.input_dim) + "," + std::to_string(p.hidden_dim) + ")");
  Var z = concat(x_t, h_prev, 1);
  Var i = sigmoid(add(matmul(z, tape.leaf(p.w_input)), tape.leaf(p.b_input)));
  Var f = sigmoid(add(matmul(z, tape.leaf(p.w_forget)), tape.leaf(p.b_forget)));
  Var g = tanh_(add(matmul(z, tape.leaf(p.w_candidate)),
                    tape.leaf(p.b_candidate)));
  Var o = sigmoid(add(matmul(z, tape.leaf(p.w_output)), tape.leaf(p.b_output)));
  Var c_t = add(mul(f, c_prev), mul(i, g));
  Var h_t = mul(o, tanh_(c_t));
  return {h_t, c_t};
}

BiLstmEncoder::BiLstmEncoder(const std::string& prefix, std::size_t k,
                             std::size_t h, SeededRng& rng)
    : fwd(prefix + ".fwd", k, h, rng), bwd(prefix + ".bwd", k, h, rng) {}

ag::Var BiLstmEncoder::encode(ag::Tape& tape, ag::Var x) {
  using namespace ag;
  const std::size_t len = x.rows();
  const std::size_t h = fwd.hidden_dim;
  Var h0 = tape.constant(Tensor::zeros({1, h}));
  Var c0 = tape.constant(Tensor::zeros({1, h}));

  std::vector<Var> fwd_states(len, Var{});
  {
    Var ht = h0, ct = c0;
    for (std::size_t t = 0; t < len; ++t) {
      auto [nh, nc] = lstm_step(tape, slice_rows(x, t, 1), ht, ct, fwd);
      ht = nh;
      ct = nc;
      fwd_states[t] = ht;
    }
  }
  std::vector<Var> bwd_states(len, Var{});
  {
    Var ht = h0, ct = c0;
    for (std::size_t t = len; t-- > 0;) {
      auto [nh, nc] = lstm_step(tape, slice_rows(x, t, 1), ht, ct, bwd);
      ht = nh;
      ct = nc;
      bwd_states[t] = ht;
    }
  }
  std::vector<Var> rows;
  rows.reserve(len);
  for (std::size_t t = 0; t < len; ++t)
    rows.push_back(concat(fwd_states[t], bwd_states[t], 1));
  return stack_rows(rows);
}

std::vector<Parameter*> BiLstmEncoder::parameters() {
  auto out = fwd.parameters();
  auto b = bwd.parameters();
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

PositionalEncoding::PositionalEncoding(std::size_t m_max, std::size_t k)
    : table({m_max, k}) {
  for (std::size_t pos = 0; pos < m_max; ++pos)
    for (std::size_t i = 0; i < k; ++i) {
      const double angle =
          static_cast<double>(pos) /
          std::pow(10000.0, static_cast<double>(i - i % 2) /
                                static_cast<double>(k));
      table.at(pos, i) = (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
    }
}

ag::Var attention(ag::Tape& tape, ag::Var q, ag::Var k, ag::Var v,
                  const std::vector<char>* key_mask) {
  using namespace ag;
  const std::size_t d_k = q.cols();
  if (d_k == 0) throw std::invalid_argument("attention: d_k is zero");
  if (k.cols() != d_k)
    throw std::invalid_argument("attention: query dim " + std::to_string(d_k) +
                                " vs key dim " + std::to_string(k.cols()));
  if (k.rows() != v.rows())
    throw std::invalid_argument("attention: key rows " +
                                std::to_string(k.rows()) + " vs value rows " +
                                std::to_string(v.rows()));
  Var scores = scale(matmul(q, transpose(k)),
                     1.0 / std::sqrt(static_cast<double>(d_k)));
  if (key_mask != nullptr) {
    if (key_mask->size() != k.rows())
      throw std::invalid_argument("attention: mask length mismatch");
    std::vector<char> keep(scores.value().size(), 1);
    for (std::size_t i = 0; i < scores.rows(); ++i)
      for (std::size_t j = 0; j < scores.cols(); ++j)
        keep[i * scores.cols() + j] = (*key_mask)[j];
    scores = masked_fill(scores, keep, -1e30);
  }
  return matmul(softmax_rows(scores), v);
}

TransformerLayer::TransformerLayer(const std::string& prefix, std::size_t k,
                                   std::size_t n_heads, SeededRng& rng)
    : model_dim(k) {
  if (n_heads == 0 || k % n_heads != 0)
    throw std::invalid_argument("TransformerLayer: head count " +
                                std::to_string(n_heads) +
                                " must divide model width " +
                                std::to_string(k));
  const std::size_t d_k = k / n_heads;
  for (std::size_t h = 0; h < n_heads; ++h) {
    const std::string hp = prefix + ".head" + std::to_string(h);
    heads.push_back(Head{
        Parameter(hp + ".w_q", uniform_init({k, d_k}, rng)),
        Parameter(hp + ".w_k", uniform_init({k, d_k}, rng)),
        Parameter(hp + ".w_v", uniform_init({k, d_k}, rng))});
  }
  w_o = Parameter(prefix + ".w_o", uniform_init({k, k}, rng));
  ff_w1 = Parameter(prefix + ".ff_w1", uniform_init({k, 4 * k}, rng));
  ff_b1 = Parameter(prefix + ".ff_b1", Tensor::zeros({1, 4 * k}));
  ff_w2 = Parameter(prefix + ".ff_w2", uniform_init({4 * k, k}, rng));
  ff_b2 = Parameter(prefix + ".ff_b2", Tensor::zeros({1, k}));
  Tensor ones({1, k});
  ones.fill(1.0);
  ln1_gain = Parameter(prefix + ".ln1_gain", ones);
  ln1_bias = Parameter(prefix + ".ln1_bias", Tensor::zeros({1, k}));
  ln2_gain = Parameter(prefix + ".ln2_gain", ones);
  ln2_bias = Parameter(prefix + ".ln2_bias", Tensor::zeros({1, k}));
}

ag::Var TransformerLayer::multi_head_attention(
    ag::Tape& tape, ag::Var x, const std::vector<char>* key_mask) {
  using namespace ag;
  if (x.cols() != model_dim)
    throw std::invalid_argument("multi_head_attention: input width " +
                                std::to_string(x.cols()) + " vs model dim " +
                                std::to_string(model_dim));
  Var combined{};
  for (auto& head : heads) {
    Var att = attention(tape, matmul(x, tape.leaf(head.w_q)),
                        matmul(x, tape.leaf(head.w_k)),
                        matmul(x, tape.leaf(head.w_v)), key_mask);
    combined = (combined.node == nullptr) ? att : concat(combined, att, 1);
  }
  return matmul(combined, tape.leaf(w_o));
}

ag::Var TransformerLayer::apply(ag::Tape& tape, ag::Var x,
                                const std::vector<char>* key_mask) {
  using namespace ag;
  Var att = multi_head_attention(tape, x, key_mask);
  Var y = layer_norm_rows(add(x, att), tape.leaf(ln1_gain),
                          tape.leaf(ln1_bias));
  Var ff = add_rowvec(
      matmul(tanh_(add_rowvec(matmul(y, tape.leaf(ff_w1)), tape.leaf(ff_b1))),
             tape.leaf(ff_w2)),
      tape.leaf(ff_b2));
  return layer_norm_rows(add(y, ff), tape.leaf(ln2_gain), tape.leaf(ln2_bias));
}

std::vector<Parameter*> TransformerLayer::parameters() {
  std::vector<Parameter*> out;
  for (auto& h : heads) {
    out.push_back(&h.w_q);
    out.push_back(&h.w_k);
    out.push_back(&h.w_v);
  }
  for (Parameter* p : {&w_o, &ff_w1, &ff_b1, &ff_w2, &ff_b2, &ln1_gain,
                       &ln1_bias, &ln2_gain, &ln2_bias})
    out.push_back(p);
  return out;
}

TransformerEncoder::TransformerEncoder(const std::string& prefix,
                                       std::size_t k, std::size_t n_heads,
                                       std::size_t n_layers, std::size_t m_max,
                                       SeededRng& rng)
    : pe(m_max, k) {
  for (std::size_t l = 0; l < n_layers; ++l)
    layers.emplace_back(prefix + ".layer" + std::to_string(l), k, n_heads,
                        rng);
}

ag::Var TransformerEncoder::encode(ag::Tape& tape, ag::Var x) {
  using namespace ag;
  const std::size_t len = x.rows();
  if (len > pe.table.rows())
    throw std::invalid_argument("TransformerEncoder: sequence length " +
                                std::to_string(len) +
                                " exceeds position table " +
                                std::to_string(pe.table.rows()));
  Tensor positions({len, x.cols()});
  for (std::size_t i = 0; i < len; ++i)
    for (std::size_t j = 0; j < x.cols(); ++j)
      positions.at(i, j) = pe.table.at(i, j);
  Var y = add(x, tape.constant(std::move(positions)));
  for (auto& layer : layers) y = layer.apply(tape, y);
  return y;
}

std::vector<Parameter*> TransformerEncoder::parameters() {
  std::vector<Parameter*> out;
  for (auto& l : layers) {
    auto ps = l.parameters();
    out.insert(out.end(), ps.begin(), ps.end());
  }
  return out;
}

}  // namespace deid
