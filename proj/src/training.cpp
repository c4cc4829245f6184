#include "deid/training.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "deid/checkpoint.hpp"
#include "deid/rng.hpp"

namespace deid {

void TrainConfig::validate() const {
  if (learning_rate <= 0.0)
    throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
  if (batch_size < 1)
    throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
  if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
}

void adam_step(const std::vector<Parameter*>& params, AdamState& state,
               const TrainConfig& tc) {
  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double bc1 = 1.0 - std::pow(tc.beta1, t);
  const double bc2 = 1.0 - std::pow(tc.beta2, t);
  for (Parameter* p : params) {
    if (p->frozen) continue;
    if (!p->grad.all_finite())
      throw std::runtime_error("adam_step: non-finite gradient in parameter " +
                               p->name);
    auto [it, inserted] = state.moments.try_emplace(p);
    if (inserted) {
      it->second.m = Tensor::zeros(p->value.shape());
      it->second.v = Tensor::zeros(p->value.shape());
    }
    Tensor& m = it->second.m;
    Tensor& v = it->second.v;
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      const double g = p->grad[i];
      m[i] = tc.beta1 * m[i] + (1.0 - tc.beta1) * g;
      v[i] = tc.beta2 * v[i] + (1.0 - tc.beta2) * g * g;
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      p->value[i] -= tc.learning_rate * m_hat / (std::sqrt(v_hat) + tc.epsilon);
    }
  }
}

std::vector<EpochRecord> fit(
    Model& model, const std::vector<EncodedSentence>& train,
    const TrainConfig& tc, const std::string& checkpoint_path,
    const std::function<void(const EpochRecord&)>& on_epoch) {
  tc.validate();
  auto params = model.parameters();
  AdamState state;
  constexpr std::uint64_t kShuffleStream = 0x53484646;
  SeededRng shuffle_rng = SeededRng(tc.seed).fork(kShuffleStream);
  std::vector<EpochRecord> trace;
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 1; epoch <= tc.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    // Fisher-Yates with the seeded stream; std::shuffle is not
    // implementation-stable.
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[shuffle_rng.index(i)]);

    double epoch_loss = 0.0;
    for (std::size_t b = 0; b < order.size(); b += tc.batch_size) {
      const std::size_t b_end = std::min(order.size(), b + tc.batch_size);
      for (Parameter* p : params) p->zero_grad();
      ag::Tape tape;
      ag::Var batch_loss = tape.constant(Tensor::scalar(0.0));
      for (std::size_t i = b; i < b_end; ++i)
        batch_loss = ag::add(batch_loss,
                             model.sentence_loss(tape, train[order[i]]));
      epoch_loss += batch_loss.value().scalar_value();
      tape.backward(batch_loss);
      model.constrain_gradients();
      adam_step(params, state, tc);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = epoch_loss;
    rec.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (!checkpoint_path.empty()) save_checkpoint(model, checkpoint_path);
    if (on_epoch) on_epoch(rec);
    trace.push_back(rec);
  }
  return trace;
}

}  // namespace deid
