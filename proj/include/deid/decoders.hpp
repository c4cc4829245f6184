#pragma once

#include <utility>
#include <vector>

#include "deid/autodiff.hpp"
#include "deid/rng.hpp"

namespace deid {

// Time-distributed dense layer with softmax activation; the same weights
// apply at every position.
struct SoftmaxDecoder {
  Parameter w;  // h_out x |K|
  Parameter b;  // 1 x |K|

  SoftmaxDecoder() = default;
  SoftmaxDecoder(std::size_t h_out, std::size_t n_labels, SeededRng& rng);

  ag::Var logits(ag::Tape& tape, ag::Var h);       // len x |K|
  ag::Var probabilities(ag::Tape& tape, ag::Var h);  // row-wise softmax
  // Negative log of the independence product over the given positions.
  ag::Var sequence_nll(ag::Tape& tape, ag::Var h,
                       const std::vector<int>& labels);
  std::vector<Parameter*> parameters();
};

// Value-level log of the tag-sequence probability under independent softmax
// rows; masked positions contribute nothing.
double softmax_sequence_logprob(const Tensor& probs,
                                const std::vector<int>& labels,
                                const std::vector<char>& mask);

// Linear-chain CRF: emission projection plus transition matrix T and
// begin/end cost vectors. The sequence score is
//   b[y_1] + sum_t s_t[y_t] + sum_t T[y_t, y_{t+1}] + e[y_m].
struct CrfParams {
  Parameter emit_w;  // h_out x |K|
  Parameter emit_b;  // 1 x |K|
  Parameter trans;   // |K| x |K|
  Parameter begin;   // 1 x |K|
  Parameter end;     // 1 x |K|
  std::size_t n_labels = 0;

  CrfParams() = default;
  CrfParams(std::size_t h_out, std::size_t n_labels, SeededRng& rng);

  ag::Var scores(ag::Tape& tape, ag::Var h);  // len x |K| emissions
  std::vector<Parameter*> parameters();
};

// Global score of one tag sequence. scores is m_eff x |K| with m_eff >= 1.
ag::Var crf_score(ag::Tape& tape, ag::Var scores,
                  const std::vector<int>& labels, CrfParams& crf);

// log sum over all |K|^m_eff sequences of exp(score), via the forward
// algorithm in log space.
ag::Var crf_log_partition(ag::Tape& tape, ag::Var scores, CrfParams& crf);

// Negative log posterior of the gold sequence.
ag::Var crf_nll(ag::Tape& tape, ag::Var scores, const std::vector<int>& labels,
                CrfParams& crf);

// Highest-scoring tag sequence and its score. Ties break toward the lowest
// label id. Value-level: operates on concrete tensors.
std::pair<std::vector<int>, double> viterbi_decode(const Tensor& scores,
                                                   const Tensor& trans,
                                                   const Tensor& begin,
                                                   const Tensor& end);

// Value-level sequence score; shared by viterbi_decode's contract and tests.
double crf_sequence_score(const Tensor& scores, const std::vector<int>& labels,
                          const Tensor& trans, const Tensor& begin,
                          const Tensor& end);

}  // namespace deid
