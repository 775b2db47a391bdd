#include "phaseest/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace phaseest {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

Rng Rng::substream(std::uint64_t seed, std::uint64_t index) {
  return Rng(mix64(mix64(seed + kGolden) + kGolden * (index + 1)));
}

std::uint64_t Rng::next_u64() {
  state_ += kGolden;
  return mix64(state_);
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_ = r * std::sin(angle);
  has_cached_ = true;
  return r * std::cos(angle);
}

Complex Rng::complex_gaussian() {
  const double re = gaussian();
  const double im = gaussian();
  return Complex(re, im);
}

std::vector<long long> multinomial_sample(long long n, const RealVec& probs, Rng& rng) {
  const Eigen::Index k = probs.size();
  if (k < 1) throw std::invalid_argument("multinomial_sample: empty probability vector");
  if (n < 0) throw std::invalid_argument("multinomial_sample: negative count");
  double total = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    if (probs[i] < -1e-12) {
      throw std::invalid_argument("multinomial_sample: negative probability");
    }
    total += std::max(probs[i], 0.0);
  }
  if (total <= 0.0) throw std::invalid_argument("multinomial_sample: zero total probability");

  std::vector<long long> counts(static_cast<std::size_t>(k), 0);
  if (n == 0) return counts;

  // Normalized partial sums of n+1 exponential gaps are the order statistics
  // of n uniforms; one sweep over the outcome CDF bins them.
  std::vector<double> cum(static_cast<std::size_t>(n) + 1);
  double acc = 0.0;
  for (std::size_t i = 0; i < cum.size(); ++i) {
    acc += -std::log(1.0 - rng.uniform());
    cum[i] = acc;
  }
  const double denom = cum.back();

  Eigen::Index bin = 0;
  double bin_upper = std::max(probs[0], 0.0) / total;
  for (long long i = 0; i < n; ++i) {
    const double u = cum[static_cast<std::size_t>(i)] / denom;
    while (u > bin_upper && bin + 1 < k) {
      ++bin;
      bin_upper += std::max(probs[bin], 0.0) / total;
    }
    ++counts[static_cast<std::size_t>(bin)];
  }
  return counts;
}

}  // namespace phaseest
