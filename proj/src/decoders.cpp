#include "deid/decoders.hpp"

#include <cmath>
#include <stdexcept>

namespace deid {

namespace {

Tensor uniform_init(std::vector<std::size_t> shape, SeededRng& rng) {
  Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-0.1, 0.1);
  return t;
}

void check_labels(const std::vector<int>& labels, std::size_t m,
                  std::size_t k, const char* op) {
  if (labels.size() != m)
    throw std::invalid_argument(std::string(op) + ": " +
                                std::to_string(labels.size()) +
                                " labels for " + std::to_string(m) +
                                " positions");
  for (int y : labels)
    if (y < 0 || static_cast<std::size_t>(y) >= k)
      throw std::out_of_range(std::string(op) + ": label id " +
                              std::to_string(y) + " outside tag set of size " +
                              std::to_string(k));
}

}  // namespace

SoftmaxDecoder::SoftmaxDecoder(std::size_t h_out, std::size_t n_labels,
                               SeededRng& rng)
    : w(Parameter("softmax.w", uniform_init({h_out, n_labels}, rng))),
      b(Parameter("softmax.b", Tensor::zeros({1, n_labels}))) {}

ag::Var SoftmaxDecoder::logits(ag::Tape& tape, ag::Var h) {
  return ag::add_rowvec(ag::matmul(h, tape.leaf(w)), tape.leaf(b));
}

ag::Var SoftmaxDecoder::probabilities(ag::Tape& tape, ag::Var h) {
  return ag::softmax_rows(logits(tape, h));
}

ag::Var SoftmaxDecoder::sequence_nll(ag::Tape& tape, ag::Var h,
                                     const std::vector<int>& labels) {
  using namespace ag;
  Var z = logits(tape, h);
  check_labels(labels, z.rows(), z.cols(), "sequence_nll");
  std::vector<std::pair<std::size_t, std::size_t>> picks;
  for (std::size_t t = 0; t < labels.size(); ++t)
    picks.emplace_back(t, static_cast<std::size_t>(labels[t]));
  Var log_norm = reduce_sum(logsumexp(z, 1));
  return sub(log_norm, sum_entries(z, std::move(picks)));
}

std::vector<Parameter*> SoftmaxDecoder::parameters() { return {&w, &b}; }

double softmax_sequence_logprob(const Tensor& probs,
                                const std::vector<int>& labels,
                                const std::vector<char>& mask) {
  if (labels.size() != probs.rows() || mask.size() != probs.rows())
    throw std::invalid_argument("softmax_sequence_logprob: length mismatch");
  double total = 0.0;
  for (std::size_t t = 0; t < labels.size(); ++t)
    if (mask[t])
      total += std::log(probs.at(t, static_cast<std::size_t>(labels[t])));
  return total;
}

CrfParams::CrfParams(std::size_t h_out, std::size_t n_labels_, SeededRng& rng)
    : emit_w(Parameter("crf.emit_w", uniform_init({h_out, n_labels_}, rng))),
      emit_b(Parameter("crf.emit_b", Tensor::zeros({1, n_labels_}))),
      trans(Parameter("crf.trans", uniform_init({n_labels_, n_labels_}, rng))),
      begin(Parameter("crf.begin", Tensor::zeros({1, n_labels_}))),
      end(Parameter("crf.end", Tensor::zeros({1, n_labels_}))),
      n_labels(n_labels_) {}

ag::Var CrfParams::scores(ag::Tape& tape, ag::Var h) {
  return ag::add_rowvec(ag::matmul(h, tape.leaf(emit_w)), tape.leaf(emit_b));
}

std::vector<Parameter*> CrfParams::parameters() {
  return {&emit_w, &emit_b, &trans, &begin, &end};
}

ag::Var crf_score(ag::Tape& tape, ag::Var scores,
                  const std::vector<int>& labels, CrfParams& crf) {
  using namespace ag;
  const std::size_t m = scores.rows(), k = scores.cols();
  if (m < 1) throw std::invalid_argument("crf_score: empty sequence");
  check_labels(labels, m, k, "crf_score");

  std::vector<std::pair<std::size_t, std::size_t>> emit_picks;
  for (std::size_t t = 0; t < m; ++t)
    emit_picks.emplace_back(t, static_cast<std::size_t>(labels[t]));
  Var total = sum_entries(scores, std::move(emit_picks));

  if (m > 1) {
    std::vector<std::pair<std::size_t, std::size_t>> trans_picks;
    for (std::size_t t = 0; t + 1 < m; ++t)
      trans_picks.emplace_back(static_cast<std::size_t>(labels[t]),
                               static_cast<std::size_t>(labels[t + 1]));
    total = add(total, sum_entries(tape.leaf(crf.trans),
                                   std::move(trans_picks)));
  }
  total = add(total,
              sum_entries(tape.leaf(crf.begin),
                          {{0, static_cast<std::size_t>(labels.front())}}));
  total = add(total,
              sum_entries(tape.leaf(crf.end),
                          {{0, static_cast<std::size_t>(labels.back())}}));
  return total;
}

ag::Var crf_log_partition(ag::Tape& tape, ag::Var scores, CrfParams& crf) {
  using namespace ag;
  const std::size_t m = scores.rows();
  if (m < 1) throw std::invalid_argument("crf_log_partition: empty sequence");
  Var trans = tape.leaf(crf.trans);
  // alpha_1[j] = begin[j] + s_1[j]
  Var alpha = add(tape.leaf(crf.begin), slice_rows(scores, 0, 1));
  for (std::size_t t = 1; t < m; ++t) {
    // alpha_t[j] = logsumexp_i(alpha_{t-1}[i] + T[i,j]) + s_t[j]
    Var expanded = add_colvec(trans, alpha);
    alpha = add(logsumexp(expanded, 0), slice_rows(scores, t, 1));
  }
  return logsumexp(add(alpha, tape.leaf(crf.end)), 1);
}

ag::Var crf_nll(ag::Tape& tape, ag::Var scores, const std::vector<int>& labels,
                CrfParams& crf) {
  return ag::sub(crf_log_partition(tape, scores, crf),
                 crf_score(tape, scores, labels, crf));
}

double crf_sequence_score(const Tensor& scores, const std::vector<int>& labels,
                          const Tensor& trans, const Tensor& begin,
                          const Tensor& end) {
  const std::size_t m = scores.rows();
  check_labels(labels, m, scores.cols(), "crf_sequence_score");
  double total = begin.at(0, static_cast<std::size_t>(labels.front())) +
                 end.at(0, static_cast<std::size_t>(labels.back()));
  for (std::size_t t = 0; t < m; ++t)
    total += scores.at(t, static_cast<std::size_t>(labels[t]));
  for (std::size_t t = 0; t + 1 < m; ++t)
    total += trans.at(static_cast<std::size_t>(labels[t]),
                      static_cast<std::size_t>(labels[t + 1]));
  return total;
}

std::pair<std::vector<int>, double> viterbi_decode(const Tensor& scores,
                                                   const Tensor& trans,
                                                   const Tensor& begin,
                                                   const Tensor& end) {
  const std::size_t m = scores.rows(), k = scores.cols();
  if (m < 1) throw std::invalid_argument("viterbi_decode: empty sequence");

  std::vector<double> best(k);
  std::vector<std::vector<std::size_t>> back(m, std::vector<std::size_t>(k, 0));
  for (std::size_t j = 0; j < k; ++j) best[j] = begin.at(0, j) + scores.at(0, j);
  for (std::size_t t = 1; t < m; ++t) {
    std::vector<double> next(k);
    for (std::size_t j = 0; j < k; ++j) {
      double best_score = best[0] + trans.at(0, j);
      std::size_t best_prev = 0;
      for (std::size_t i = 1; i < k; ++i) {
        const double s = best[i] + trans.at(i, j);
        if (s > best_score) {  // strict: ties keep the lowest label id
          best_score = s;
          best_prev = i;
        }
      }
      next[j] = best_score + scores.at(t, j);
      back[t][j] = best_prev;
    }
    best = std::move(next);
  }
  std::size_t last = 0;
  double best_total = best[0] + end.at(0, 0);
  for (std::size_t j = 1; j < k; ++j) {
    const double s = best[j] + end.at(0, j);
    if (s > best_total) {
      best_total = s;
      last = j;
    }
  }
  std::vector<int> labels(m);
  labels[m - 1] = static_cast<int>(last);
  for (std::size_t t = m; t-- > 1;) {
    last = back[t][last];
    labels[t - 1] = static_cast<int>(last);
  }
  return {labels, best_total};
}

}  // namespace deid
