#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phaseest/generators.hpp"
#include "phaseest/linalg.hpp"

namespace phaseest {

/// Labeled PSD operators summing to identity.
struct Povm {
  int dim = 0;
  std::vector<Mat> elements;
  std::vector<std::string> labels;

  int size() const { return static_cast<int>(elements.size()); }
};

/// Throws std::invalid_argument unless every element is PSD and the elements
/// sum to identity (within tol).
void validate_povm(const Povm& p, double tol = kStructuralTol);

/// Saturating measurement for the single-system phase model at theta = 0 with
/// the phase-state input of the given phases. Builds the orthonormal set
/// {H^{-1/2}|l>, |psi>} and mixes it with an orthogonal matrix whose last
/// column has no zero entry: I - (2/d)J for d >= 3, a rotation by eta for
/// d = 2 (default pi/4; sin(eta) and cos(eta) must both be nonzero). Returns
/// d rank-one projectors onto an orthonormal basis; eta is ignored for d >= 3.
Povm optimal_povm_mpeu(int d, const RealVec& phases, std::optional<double> eta = std::nullopt);
Povm optimal_povm_mpeu(int d);  // zero phases, default eta

/// Conjugate every element by exp(i Σ theta_m T_m), tensored with identity on
/// a second factor when tensored is set. Labels are preserved.
Povm shift_povm(const Povm& p, const GeneratorSet& gens, const RealVec& theta, bool tensored);

/// Separable two-party measurement for the bipartite phase model: the second
/// party projects onto the Fourier basis |w_k>, the first party applies the
/// phase-model measurement matched to the conditional state that outcome k
/// leaves (phases -2*pi*k*l/d). d^2 outcomes labeled "k:l" with k the second
/// party's outcome, both 1-based.
Povm locc_povm_mpee(int d);

}  // namespace phaseest
