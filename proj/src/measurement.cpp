#include "phaseest/measurement.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "phaseest/qfi.hpp"

namespace phaseest {

namespace {

// Inverse square root of a symmetric positive-definite matrix.
RealMat invsqrt_spd(const RealMat& a) {
  Eigen::SelfAdjointEigenSolver<RealMat> es(a);
  if (es.eigenvalues().minCoeff() <= 1e-12) {
    throw std::runtime_error("invsqrt_spd: matrix is not positive definite");
  }
  const RealVec inv_sqrt = es.eigenvalues().array().rsqrt();
  return es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

void validate_povm(const Povm& p, double tol) {
  if (p.dim < 1 || p.elements.empty() || p.labels.size() != p.elements.size()) {
    throw std::invalid_argument("povm: empty or inconsistently labeled");
  }
  Mat sum = Mat::Zero(p.dim, p.dim);
  for (const Mat& e : p.elements) {
    if (e.rows() != p.dim || e.cols() != p.dim) {
      throw std::invalid_argument("povm: element dimension mismatch");
    }
    if (!is_psd(e, tol)) {
      throw std::invalid_argument("povm: element is not positive semidefinite");
    }
    sum += e;
  }
  sum -= Mat::Identity(p.dim, p.dim);
  if (sum.cwiseAbs().maxCoeff() > tol) {
    throw std::invalid_argument("povm: elements do not sum to identity");
  }
}

Povm optimal_povm_mpeu(int d, const RealVec& phases, std::optional<double> eta) {
  if (d < 2) throw std::invalid_argument("optimal_povm_mpeu: d must be >= 2");
  const ModelPoint model = mpeu_model(phase_state(d, phases), RealVec::Zero(d - 1));

  // Orthonormal set: the whitened information vectors plus the state itself.
  const std::vector<Vec> ls = l_vectors(model);
  const RealMat w = invsqrt_spd(qfi(model));
  std::vector<Vec> m_vecs(d, Vec::Zero(d));
  for (int n = 0; n < d - 1; ++n) {
    for (int l = 0; l < d - 1; ++l) m_vecs[n] += w(n, l) * ls[l];
  }
  m_vecs[d - 1] = input_amplitudes(model);

  std::vector<Vec> b_vecs(d);
  if (d == 2) {
    const double ang = eta.value_or(std::numbers::pi / 4);
    const double c = std::cos(ang);
    const double s = std::sin(ang);
    if (std::abs(s) < 1e-12 || std::abs(c) < 1e-12) {
      throw std::invalid_argument("optimal_povm_mpeu: eta must have nonzero sine and cosine");
    }
    b_vecs[0] = c * m_vecs[0] - s * m_vecs[1];
    b_vecs[1] = s * m_vecs[0] + c * m_vecs[1];
  } else {
    Vec total = Vec::Zero(d);
    for (const Vec& mv : m_vecs) total += mv;
    for (int k = 0; k < d; ++k) b_vecs[k] = m_vecs[k] - (2.0 / d) * total;
  }

  Povm povm;
  povm.dim = d;
  for (int k = 0; k < d; ++k) {
    povm.elements.push_back(b_vecs[k] * b_vecs[k].adjoint());
    povm.labels.push_back(std::to_string(k + 1));
  }
  return povm;
}

Povm optimal_povm_mpeu(int d) {
  return optimal_povm_mpeu(d, RealVec::Zero(d), std::nullopt);
}

Povm shift_povm(const Povm& p, const GeneratorSet& gens, const RealVec& theta, bool tensored) {
  if (theta.size() != gens.count()) {
    throw std::invalid_argument("shift_povm: theta length does not match generator count");
  }
  Mat a = Mat::Zero(gens.d, gens.d);
  for (int m = 0; m < gens.count(); ++m) a += theta[m] * gens.mats[m];
  Mat u = unitary_exp(a);
  if (tensored) u = tensor(u, Mat::Identity(gens.d, gens.d));
  if (u.rows() != p.dim) {
    throw std::invalid_argument("shift_povm: unitary dimension does not match POVM");
  }
  Povm out;
  out.dim = p.dim;
  out.labels = p.labels;
  out.elements.reserve(p.elements.size());
  for (const Mat& e : p.elements) out.elements.push_back(u * e * u.adjoint());
  return out;
}

Povm locc_povm_mpee(int d) {
  if (d < 2) throw std::invalid_argument("locc_povm_mpee: d must be >= 2");
  const double tau = 2.0 * std::numbers::pi / d;
  Povm out;
  out.dim = d * d;
  out.elements.reserve(d * d);
  for (int k = 0; k < d; ++k) {
    Vec w(d);
    for (int l = 0; l < d; ++l) w[l] = std::polar(1.0 / std::sqrt(double(d)), tau * k * l);
    const Mat b_k = w * w.adjoint();

    // Outcome k leaves the first party the conjugate Fourier phase state.
    RealVec phases(d);
    for (int l = 0; l < d; ++l) phases[l] = -tau * k * l;
    const Povm alice = optimal_povm_mpeu(d, phases);
    for (int l = 0; l < d; ++l) {
      out.elements.push_back(tensor(alice.elements[l], b_k));
      out.labels.push_back(std::to_string(k + 1) + ":" + std::to_string(l + 1));
    }
  }
  return out;
}

}  // namespace phaseest
