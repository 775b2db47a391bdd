#include "phaseest/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace phaseest {

namespace {

void require_square(const Mat& a, const char* who) {
  if (a.rows() != a.cols() || a.rows() < 1) {
    throw std::invalid_argument(std::string(who) + ": operator must be square and nonempty");
  }
}

// sin(x)/x, accurate through x = 0.
double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
  }
  return std::sin(x) / x;
}

}  // namespace

bool is_hermitian(const Mat& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_psd(const Mat& a, double tol) {
  if (!is_hermitian(a, tol)) return false;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (a + a.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

bool is_unitary(const Mat& a, double tol) {
  if (a.rows() != a.cols()) return false;
  Mat g = a.adjoint() * a;
  g.diagonal().array() -= 1.0;
  return g.cwiseAbs().maxCoeff() <= tol;
}

Mat tensor(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Mat partial_trace_b(const Mat& op, int dim_a, int dim_b) {
  require_square(op, "partial_trace_b");
  if (dim_a < 1 || dim_b < 1 || op.rows() != Eigen::Index(dim_a) * dim_b) {
    throw std::invalid_argument("partial_trace_b: operator dimension is not dim_a * dim_b");
  }
  Mat out = Mat::Zero(dim_a, dim_a);
  for (int i = 0; i < dim_a; ++i) {
    for (int j = 0; j < dim_a; ++j) {
      Complex sum = 0.0;
      for (int k = 0; k < dim_b; ++k) {
        sum += op(i * dim_b + k, j * dim_b + k);
      }
      out(i, j) = sum;
    }
  }
  return out;
}

HermitianEig hermitian_eig(const Mat& op) {
  require_square(op, "hermitian_eig");
  if (!is_hermitian(op)) {
    throw std::invalid_argument("hermitian_eig: input is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (op + op.adjoint()));
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("hermitian_eig: eigensolver failed to converge");
  }
  return HermitianEig{es.eigenvalues(), es.eigenvectors()};
}

Mat unitary_exp(const Mat& h) {
  const HermitianEig eig = hermitian_eig(h);
  Vec phases(eig.eigenvalues.size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) {
    phases[k] = std::polar(1.0, eig.eigenvalues[k]);
  }
  return eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();
}

Mat exp_frechet(const Mat& h, const Mat& dh) {
  if (h.rows() != dh.rows() || h.cols() != dh.cols()) {
    throw std::invalid_argument("exp_frechet: dimension mismatch between h and dh");
  }
  if (!is_hermitian(dh)) {
    throw std::invalid_argument("exp_frechet: direction dh is not Hermitian");
  }
  const HermitianEig eig = hermitian_eig(h);
  const RealVec& w = eig.eigenvalues;
  const Mat dh_eig = eig.eigenvectors.adjoint() * dh * eig.eigenvectors;

  Mat dv(w.size(), w.size());
  const Complex iunit(0.0, 1.0);
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    for (Eigen::Index k = 0; k < w.size(); ++k) {
      const double half = 0.5 * (w[j] - w[k]);
      const Complex phi = std::polar(1.0, 0.5 * (w[j] + w[k])) * sinc(half);
      dv(j, k) = iunit * dh_eig(j, k) * phi;
    }
  }
  return eig.eigenvectors * dv * eig.eigenvectors.adjoint();
}

}  // namespace phaseest
