#pragma once

#include <cstdint>
#include <vector>

#include "phaseest/linalg.hpp"

namespace phaseest {

/// Deterministic splitmix64 stream. std::random distributions are
/// implementation-defined, so seeded runs would not be reproducible across
/// standard libraries; everything here is pinned down bit for bit.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  /// Independent stream for (seed, index); used for per-trial substreams.
  static Rng substream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next_u64();

  /// Uniform on [0, 1).
  double uniform();

  /// Standard normal via Box-Muller (second value cached).
  double gaussian();

  /// Gaussian real and imaginary parts.
  Complex complex_gaussian();

 private:
  std::uint64_t state_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

/// One multinomial draw of n items over probs (nonnegative, summing to ~1).
/// Sorted-uniform spacings method: exact counts in a single sweep.
std::vector<long long> multinomial_sample(long long n, const RealVec& probs, Rng& rng);

}  // namespace phaseest
