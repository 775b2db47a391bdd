#pragma once

#include <vector>

#include "phaseest/linalg.hpp"

namespace phaseest {

enum class GeneratorKind { kCommuting, kFull };

/// Ordered family of traceless Hermitian matrices, orthonormal in the
/// Hilbert-Schmidt inner product tr(T_m T_n) = δ_mn.
struct GeneratorSet {
  int d = 0;
  GeneratorKind kind = GeneratorKind::kCommuting;
  std::vector<Mat> mats;
  /// Commuting kind only: row m holds the diagonal of mats[m].
  RealMat coeffs;

  int count() const { return static_cast<int>(mats.size()); }
};

/// The d-1 diagonal generators: T_m = diag(1,...,1,-m,0,...,0)/sqrt(m(m+1))
/// with m leading ones. Pairwise commuting, sum of squares ((d-1)/d)*I.
GeneratorSet commuting_generators(int d);

/// Full orthonormal basis of traceless Hermitian d x d matrices (d^2-1
/// elements): the diagonal generators above first, then for each pair j < k
/// the symmetric element (|j><k|+|k><j|)/sqrt(2) followed by the antisymmetric
/// element (-i|j><k|+i|k><j|)/sqrt(2).
GeneratorSet su_basis(int d);

/// Hilbert-Schmidt components tr(a * T_m) of a Hermitian operator against the
/// set (real by Hermiticity of both factors).
RealVec hs_coefficients(const Mat& a, const GeneratorSet& gens);

}  // namespace phaseest
