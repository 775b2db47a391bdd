#pragma once

// Oracles and generators shared by the unit and acceptance suites. Everything
// here is deliberately independent of the library's decomposition-based
// implementations: power series, finite differences, closed-form roots.

#include <cmath>
#include <vector>

#include "phaseest/linalg.hpp"
#include "phaseest/measurement.hpp"
#include "phaseest/qfi.hpp"
#include "phaseest/rng.hpp"

namespace testsupport {

using phaseest::Complex;
using phaseest::Mat;
using phaseest::RealMat;
using phaseest::RealVec;
using phaseest::Rng;
using phaseest::Vec;

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& a) {
  return a.cwiseAbs().maxCoeff();
}

inline Mat random_matrix(int d, Rng& rng) {
  Mat g(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) g(i, j) = rng.complex_gaussian();
  }
  return g;
}

inline Mat random_hermitian(int d, Rng& rng) {
  const Mat g = random_matrix(d, rng);
  return 0.5 * (g + g.adjoint());
}

inline Mat random_density(int d, Rng& rng) {
  const Mat g = random_matrix(d, rng);
  Mat rho = g * g.adjoint();
  return rho / rho.trace();
}

// Haar unitary: QR of a Gaussian matrix with the phase convention fixed.
inline Mat random_unitary(int d, Rng& rng) {
  const Mat g = random_matrix(d, rng);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < d; ++k) {
    const Complex rkk = r(k, k);
    if (std::abs(rkk) > 0) q.col(k) *= rkk / std::abs(rkk);
  }
  return q;
}

// Power-series oracle for exp(i*h), independent of any eigendecomposition.
inline Mat exp_series_i(const Mat& h, int order) {
  const Complex iunit(0.0, 1.0);
  Mat term = Mat::Identity(h.rows(), h.cols());
  Mat sum = term;
  for (int k = 1; k <= order; ++k) {
    term = (term * (iunit * h)) / double(k);
    sum += term;
  }
  return sum;
}

inline Mat frechet_central_diff(const Mat& h, const Mat& dh, double eps) {
  return (phaseest::unitary_exp(h + eps * dh) - phaseest::unitary_exp(h - eps * dh)) / (2.0 * eps);
}

inline RealVec random_theta(int p, double half_width, Rng& rng) {
  RealVec theta(p);
  for (int i = 0; i < p; ++i) theta[i] = (rng.uniform() - 0.5) * 2.0 * half_width;
  return theta;
}

// Central-difference QFI from output-state derivatives:
// H_ij = 4 Re[<d_i psi|d_j psi> - <d_i psi|psi><psi|d_j psi>].
inline RealMat qfi_central_diff(const phaseest::ModelPoint& m, double eps) {
  const int p = phaseest::parameter_count(m);
  const Vec psi = phaseest::output_state(m);
  std::vector<Vec> dpsi(p);
  for (int i = 0; i < p; ++i) {
    phaseest::ModelPoint plus = m;
    phaseest::ModelPoint minus = m;
    plus.theta[i] += eps;
    minus.theta[i] -= eps;
    dpsi[i] = (phaseest::output_state(plus) - phaseest::output_state(minus)) / (2.0 * eps);
  }
  RealMat h(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      const Complex overlap = dpsi[i].dot(dpsi[j]);
      const Complex centered = dpsi[i].dot(psi) * psi.dot(dpsi[j]);
      h(i, j) = 4.0 * (overlap - centered).real();
    }
  }
  return h;
}

// Random orthonormal-basis POVM (rank-one projectors of a Haar unitary).
inline phaseest::Povm random_basis_povm(int dim, Rng& rng) {
  const Mat u = random_unitary(dim, rng);
  phaseest::Povm p;
  p.dim = dim;
  for (int k = 0; k < dim; ++k) {
    p.elements.push_back(u.col(k) * u.col(k).adjoint());
    p.labels.push_back(std::to_string(k + 1));
  }
  return p;
}

}  // namespace testsupport
