#pragma once

// Portable seeded random streams.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. Stream k of seed s is seeded with splitmix64(s ^ splitmix64(k)),
// so start i of a multi-start run is reproducible independently of how many
// other starts run or in which order. Distributions are implemented here
// rather than taken from <random>, whose distribution algorithms are
// implementation-defined.

#include <cstdint>
#include <random>

namespace l12 {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  bool coin() { return (next() >> 63) != 0; }
  /// Standard normal via Box-Muller (no cached second variate).
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace l12
