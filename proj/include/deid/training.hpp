#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "deid/model.hpp"

namespace deid {

struct TrainConfig {
  double learning_rate = 0.001;
  std::size_t batch_size = 32;
  std::size_t epochs = 10;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

struct AdamState {
  struct Moments {
    Tensor m, v;
  };
  std::unordered_map<const Parameter*, Moments> moments;
  long step_count = 0;
};

// Standard Adam update with bias correction. Frozen parameters are skipped
// entirely; a non-finite gradient raises, naming the parameter.
void adam_step(const std::vector<Parameter*>& params, AdamState& state,
               const TrainConfig& tc);

struct EpochRecord {
  std::size_t epoch = 0;   // 1-based
  double loss = 0.0;       // summed -log P over the epoch
  double wall_time_s = 0.0;
};

// Shuffles sentences once per epoch (seeded), trains in batches (the final
// partial batch included), checkpoints after every epoch when a path is
// given. Deterministic given (model seed, data, config).
std::vector<EpochRecord> fit(
    Model& model, const std::vector<EncodedSentence>& train,
    const TrainConfig& tc, const std::string& checkpoint_path = "",
    const std::function<void(const EpochRecord&)>& on_epoch = {});

}  // namespace deid
