#pragma once

#include <cstdint>

namespace mixsym {

// Counter-based generator (splitmix64 output function).  Streams with
// different seeds are independent for practical purposes, and a stream's
// output depends only on (seed, draw index), which keeps replications and
// bootstrap resamples reproducible regardless of execution order.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform draw strictly inside (0, 1); safe as an argument to log().
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via the Box-Muller transform of two stream draws.
  // The second value of each pair is cached.
  double normal();

  // Index in [0, n) chosen with equal probability.
  std::uint64_t uniform_index(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform01() * static_cast<double>(n)) % n;
  }

 private:
  std::uint64_t state_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

// Derives the seed for an isolated substream (bootstrap resample,
// simulation replication) from a base seed and a stream index.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  return seed ^ (index * 0x9e3779b97f4a7c15ULL);
}

}  // namespace mixsym
