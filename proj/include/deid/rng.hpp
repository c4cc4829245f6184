#pragma once

#include <cstdint>
#include <random>

namespace deid {

// Deterministic random source. The engine is mt19937_64 and the uniform
// mapping is fixed here rather than delegated to std::uniform_real_distribution,
// whose output is implementation-defined. Identical seed, identical stream,
// on every platform.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed);

  std::uint64_t next();
  // Uniform in [0, 1) with 53 bits of precision.
  double uniform();
  double uniform(double lo, double hi);
  // Uniform integer in [0, n); n must be positive.
  std::size_t index(std::size_t n);

  // Independent generator derived from (seed, stream). Streams with distinct
  // ids never collide in practice; used for per-model seed derivation.
  SeededRng fork(std::uint64_t stream) const;

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace deid
