#pragma once

#include <complex>

#include <Eigen/Dense>

namespace phaseest {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealMat = Eigen::MatrixXd;
using RealVec = Eigen::VectorXd;

/// Default tolerance for structural predicates (Hermitian / PSD / unitary).
inline constexpr double kStructuralTol = 1e-10;

bool is_hermitian(const Mat& a, double tol = kStructuralTol);

/// PSD test: Hermitian within tol and minimum eigenvalue >= -tol.
bool is_psd(const Mat& a, double tol = kStructuralTol);

bool is_unitary(const Mat& a, double tol = kStructuralTol);

/// Kronecker product with a's index major: (a ⊗ b)(i*db+k, j*db+l) = a(i,j) b(k,l).
Mat tensor(const Mat& a, const Mat& b);

/// Trace out the second (minor-index) factor of an operator on a dim_a*dim_b space.
Mat partial_trace_b(const Mat& op, int dim_a, int dim_b);

struct HermitianEig {
  RealVec eigenvalues;  // ascending
  Mat eigenvectors;     // columns; op = Q diag(w) Q†
};

/// Eigendecomposition of a Hermitian operator. Throws std::invalid_argument if
/// the input fails is_hermitian.
HermitianEig hermitian_eig(const Mat& op);

/// exp(i*h) for Hermitian h, computed in the eigenbasis.
Mat unitary_exp(const Mat& h);

/// Directional derivative of h ↦ exp(i*h) along the Hermitian direction dh:
/// in the eigenbasis of h, (dV)_{jk} = i * dh_{jk} * phi(w_j, w_k) where
/// phi(a,b) = (e^{ia} - e^{ib}) / (i(a-b)) and phi(a,a) = e^{ia}.
/// Evaluated as e^{i(a+b)/2} * sinc((a-b)/2), which is stable through
/// degenerate eigenvalue pairs.
Mat exp_frechet(const Mat& h, const Mat& dh);

}  // namespace phaseest
