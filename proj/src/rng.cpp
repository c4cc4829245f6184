#include "deid/rng.hpp"

#include <stdexcept>

namespace deid {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

SeededRng::SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

std::uint64_t SeededRng::next() { return engine_(); }

double SeededRng::uniform() { return (next() >> 11) * 0x1.0p-53; }

double SeededRng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

std::size_t SeededRng::index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("SeededRng::index: n must be > 0");
  // Rejection sampling for an unbiased, platform-stable draw.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return static_cast<std::size_t>(x % n);
}

SeededRng SeededRng::fork(std::uint64_t stream) const {
  return SeededRng(splitmix64(seed_ ^ splitmix64(stream + 1)));
}

}  // namespace deid
