#include "phaseest/states.hpp"

#include <cmath>
#include <stdexcept>

namespace phaseest {

namespace {

Vec normalized_or_throw(const Vec& amps, const char* who) {
  if (amps.size() < 2) throw std::invalid_argument(std::string(who) + ": need dimension >= 2");
  const double norm = amps.norm();
  if (std::abs(norm - 1.0) > 1e-6) {
    throw std::invalid_argument(std::string(who) + ": amplitudes are not normalized");
  }
  return amps / norm;
}

}  // namespace

Mat BipartiteState::coefficient_matrix() const {
  Mat r(d, d);
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) {
      r(k, l) = amps[k * d + l];
    }
  }
  return r;
}

Mat BipartiteState::reduced_a() const {
  const Mat r = coefficient_matrix();
  return r * r.adjoint();
}

PureState make_pure(const Vec& amps) {
  return PureState{normalized_or_throw(amps, "make_pure")};
}

BipartiteState make_bipartite(int d, const Vec& amps) {
  if (d < 2) throw std::invalid_argument("make_bipartite: d must be >= 2");
  if (amps.size() != Eigen::Index(d) * d) {
    throw std::invalid_argument("make_bipartite: amplitude count must be d*d");
  }
  return BipartiteState{d, normalized_or_throw(amps, "make_bipartite")};
}

PureState phase_state(int d, const RealVec& phases) {
  if (d < 2) throw std::invalid_argument("phase_state: d must be >= 2");
  if (phases.size() != d) {
    throw std::invalid_argument("phase_state: need exactly d phases");
  }
  Vec amps(d);
  const double scale = 1.0 / std::sqrt(double(d));
  for (int k = 0; k < d; ++k) amps[k] = std::polar(scale, phases[k]);
  return PureState{std::move(amps)};
}

BipartiteState maximally_entangled(int d) {
  if (d < 2) throw std::invalid_argument("maximally_entangled: d must be >= 2");
  Vec amps = Vec::Zero(Eigen::Index(d) * d);
  const double scale = 1.0 / std::sqrt(double(d));
  for (int k = 0; k < d; ++k) amps[k * d + k] = scale;
  return BipartiteState{d, std::move(amps)};
}

RealVec bloch_coefficients(const BipartiteState& s, const GeneratorSet& basis) {
  if (basis.kind != GeneratorKind::kFull) {
    throw std::invalid_argument("bloch_coefficients: need a full generator basis");
  }
  if (basis.d != s.d) {
    throw std::invalid_argument("bloch_coefficients: basis dimension does not match state");
  }
  return hs_coefficients(s.reduced_a(), basis);
}

PureState mpeu_equivalent(const BipartiteState& s, const RealVec& phases) {
  if (phases.size() != s.d) {
    throw std::invalid_argument("mpeu_equivalent: need exactly d phases");
  }
  Vec amps(s.d);
  for (int k = 0; k < s.d; ++k) {
    double pk = 0.0;
    for (int l = 0; l < s.d; ++l) pk += std::norm(s.amps[k * s.d + l]);
    amps[k] = std::polar(std::sqrt(pk), phases[k]);
  }
  return PureState{std::move(amps)};
}

PureState mpeu_equivalent(const BipartiteState& s) {
  return mpeu_equivalent(s, RealVec::Zero(s.d));
}

PureState random_pure(int d, Rng& rng) {
  if (d < 2) throw std::invalid_argument("random_pure: d must be >= 2");
  Vec amps(d);
  for (int k = 0; k < d; ++k) amps[k] = rng.complex_gaussian();
  amps /= amps.norm();
  return PureState{std::move(amps)};
}

BipartiteState random_bipartite(int d, Rng& rng) {
  if (d < 2) throw std::invalid_argument("random_bipartite: d must be >= 2");
  Vec amps(Eigen::Index(d) * d);
  for (Eigen::Index k = 0; k < amps.size(); ++k) amps[k] = rng.complex_gaussian();
  amps /= amps.norm();
  return BipartiteState{d, std::move(amps)};
}

}  // namespace phaseest
