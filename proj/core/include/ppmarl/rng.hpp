#pragma once

#include <cstdint>
#include <random>

namespace ppmarl {

// Seeded PRNG with pinned sampling algorithms. The standard library leaves
// distribution algorithms implementation-defined, so every distribution used
// anywhere in the project is implemented here once; identical seeds then give
// identical streams on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Unbiased draw in [0, n) via rejection.
  std::uint64_t below(std::uint64_t n);

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform();
  double uniform(double lo, double hi);

  // Standard normal via Box-Muller (both values used, one cached).
  double gaussian();
  double gaussian(double mean, double stddev) { return mean + stddev * gaussian(); }

  // Laplace(0, b) via inverse CDF.
  double laplace(double b);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  bool has_cached_gaussian_ = false;
  double cached_gaussian_ = 0.0;
};

}  // namespace ppmarl
