#pragma once

#include "phaseest/generators.hpp"
#include "phaseest/linalg.hpp"
#include "phaseest/rng.hpp"

namespace phaseest {

/// Normalized state vector on C^d.
struct PureState {
  Vec amps;
  int dim() const { return static_cast<int>(amps.size()); }
};

/// Normalized state on C^d ⊗ C^d, stored as the joint amplitude vector with
/// amps[k*d + l] = R(k, l) (coefficient matrix, row-major).
struct BipartiteState {
  int d = 0;
  Vec amps;

  Mat coefficient_matrix() const;
  /// Reduced state of the first factor, R R†.
  Mat reduced_a() const;
};

/// Validating constructors; amplitudes within 1e-6 of unit norm are rescaled
/// exactly, anything further off is rejected.
PureState make_pure(const Vec& amps);
BipartiteState make_bipartite(int d, const Vec& amps);

/// (1/sqrt(d)) Σ_k e^{i phases[k]} |k>.
PureState phase_state(int d, const RealVec& phases);

/// Coefficient matrix I/sqrt(d).
BipartiteState maximally_entangled(int d);

/// Components t_m = tr(RR† T_m) against a full generator basis, so that
/// RR† = I/d + Σ t_m T_m.
RealVec bloch_coefficients(const BipartiteState& s, const GeneratorSet& basis);

/// Single-system state sqrt(<k|RR†|k>) e^{i phases[k]} |k> matching the
/// bipartite input's information content for commuting-generator models.
PureState mpeu_equivalent(const BipartiteState& s, const RealVec& phases);
PureState mpeu_equivalent(const BipartiteState& s);  // all-zero phases

/// Haar-distributed states (normalized i.i.d. complex Gaussians).
PureState random_pure(int d, Rng& rng);
BipartiteState random_bipartite(int d, Rng& rng);

}  // namespace phaseest
