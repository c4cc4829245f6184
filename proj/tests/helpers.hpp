#pragma once

// Shared test utilities: tiny fixture builders and the brute-force CRF
// oracle the fast implementations are checked against.

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "deid/decoders.hpp"
#include "deid/rng.hpp"
#include "deid/tensor.hpp"
#include "deid/tokenizer.hpp"

namespace testutil {

inline deid::Tensor random_tensor(std::size_t r, std::size_t c,
                                  deid::SeededRng& rng, double lo = -1.0,
                                  double hi = 1.0) {
  deid::Tensor t = deid::Tensor::zeros({r, c});
  for (std::size_t i = 0; i < t.size(); ++i) t.data()[i] = rng.uniform(lo, hi);
  return t;
}

// Tokens laid out left to right with single spaces, offsets included.
inline std::vector<deid::Token> make_tokens(
    const std::vector<std::string>& texts) {
  std::vector<deid::Token> out;
  std::size_t pos = 0;
  for (const auto& t : texts) {
    out.push_back({t, pos, pos + t.size()});
    pos += t.size() + 1;
  }
  return out;
}

// Exhaustive enumeration of all |K|^m tag sequences. Slow by design; the
// reference the forward algorithm and Viterbi must agree with.
struct BruteForceCrf {
  double log_partition = 0.0;
  std::vector<int> best_path;
  double best_score = -std::numeric_limits<double>::infinity();
};

inline double sequence_score(const deid::Tensor& scores,
                             const std::vector<int>& y,
                             const deid::Tensor& trans,
                             const deid::Tensor& begin,
                             const deid::Tensor& end) {
  const std::size_t m = scores.rows();
  double s = begin.at(0, y[0]) + end.at(0, y[m - 1]);
  for (std::size_t t = 0; t < m; ++t) s += scores.at(t, y[t]);
  for (std::size_t t = 0; t + 1 < m; ++t) s += trans.at(y[t], y[t + 1]);
  return s;
}

inline BruteForceCrf brute_force_crf(const deid::Tensor& scores,
                                     const deid::Tensor& trans,
                                     const deid::Tensor& begin,
                                     const deid::Tensor& end) {
  const std::size_t m = scores.rows();
  const std::size_t k = scores.cols();
  BruteForceCrf out;
  std::vector<int> y(m, 0);
  // log-sum-exp accumulated in two passes for stability: max, then sum.
  double max_score = -std::numeric_limits<double>::infinity();
  const auto for_each_sequence = [&](auto&& fn) {
    std::fill(y.begin(), y.end(), 0);
    while (true) {
      fn(y);
      std::size_t i = 0;
      while (i < m && ++y[i] == static_cast<int>(k)) y[i++] = 0;
      if (i == m) break;
    }
  };
  for_each_sequence([&](const std::vector<int>& seq) {
    const double s = sequence_score(scores, seq, trans, begin, end);
    max_score = std::max(max_score, s);
    // Lexicographic enumeration from label 0 upward; strictly greater means
    // the first-found maximum is the lowest-id tie break.
    if (s > out.best_score) {
      out.best_score = s;
      out.best_path = seq;
    }
  });
  double sum = 0.0;
  for_each_sequence([&](const std::vector<int>& seq) {
    sum += std::exp(sequence_score(scores, seq, trans, begin, end) - max_score);
  });
  out.log_partition = max_score + std::log(sum);
  return out;
}

}  // namespace testutil
