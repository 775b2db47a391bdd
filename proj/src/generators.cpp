#include "phaseest/generators.hpp"

#include <cmath>
#include <stdexcept>

namespace phaseest {

GeneratorSet commuting_generators(int d) {
  if (d < 2) throw std::invalid_argument("commuting_generators: d must be >= 2");
  GeneratorSet gens;
  gens.d = d;
  gens.kind = GeneratorKind::kCommuting;
  gens.coeffs = RealMat::Zero(d - 1, d);
  gens.mats.reserve(d - 1);
  for (int m = 1; m < d; ++m) {
    const double norm = 1.0 / std::sqrt(double(m) * (m + 1));
    for (int k = 0; k < m; ++k) gens.coeffs(m - 1, k) = norm;
    gens.coeffs(m - 1, m) = -m * norm;
    Mat t = Mat::Zero(d, d);
    t.diagonal() = gens.coeffs.row(m - 1).cast<Complex>();
    gens.mats.push_back(std::move(t));
  }
  return gens;
}

GeneratorSet su_basis(int d) {
  if (d < 2) throw std::invalid_argument("su_basis: d must be >= 2");
  GeneratorSet gens = commuting_generators(d);
  gens.kind = GeneratorKind::kFull;
  gens.mats.reserve(d * d - 1);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const Complex iunit(0.0, 1.0);
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      Mat sym = Mat::Zero(d, d);
      sym(j, k) = inv_sqrt2;
      sym(k, j) = inv_sqrt2;
      gens.mats.push_back(std::move(sym));
      Mat asym = Mat::Zero(d, d);
      asym(j, k) = -iunit * inv_sqrt2;
      asym(k, j) = iunit * inv_sqrt2;
      gens.mats.push_back(std::move(asym));
    }
  }
  return gens;
}

RealVec hs_coefficients(const Mat& a, const GeneratorSet& gens) {
  if (a.rows() != gens.d || a.cols() != gens.d) {
    throw std::invalid_argument("hs_coefficients: operator dimension does not match generator set");
  }
  RealVec t(gens.count());
  for (int m = 0; m < gens.count(); ++m) {
    t[m] = (a * gens.mats[m]).trace().real();
  }
  return t;
}

}  // namespace phaseest
