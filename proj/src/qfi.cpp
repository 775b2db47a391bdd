#include "phaseest/qfi.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace phaseest {

namespace {

const Complex kI(0.0, 1.0);

// Per-joint-index phase exponents (theta-gradient of the diagonal action).
// Row m, entry j: d/dtheta_m arg(U_jj) for the commuting kinds.
RealMat diagonal_exponents(const ModelPoint& m) {
  const int d = m.gens.d;
  const int p = m.gens.count();
  const int jd = joint_dim(m);
  RealMat ex(p, jd);
  for (int mm = 0; mm < p; ++mm) {
    for (int j = 0; j < jd; ++j) {
      const int k = (m.kind == ModelKind::kMpeu) ? j : j / d;
      ex(mm, j) = m.gens.coeffs(mm, k);
    }
  }
  return ex;
}

RealMat symmetrized(const RealMat& h) { return 0.5 * (h + h.transpose()); }

// Gram matrix of l-vectors; real part is the QFI, imaginary part the
// quasiclassicality obstruction.
Mat l_gram(const ModelPoint& m) {
  const std::vector<Vec> ls = l_vectors(m);
  const int p = static_cast<int>(ls.size());
  Mat g(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      g(i, j) = ls[i].dot(ls[j]);  // Eigen dot conjugates the left argument
    }
  }
  return g;
}

// Href^{-1} via Cholesky with a condition-number guard.
RealMat inverse_reference(const RealMat& href, const char* who) {
  Eigen::SelfAdjointEigenSolver<RealMat> es(href, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (lo <= 0.0 || hi / lo > 1e12) {
    throw std::runtime_error(std::string(who) + ": reference QFI is numerically singular");
  }
  return href.llt().solve(RealMat::Identity(href.rows(), href.cols()));
}

}  // namespace

ModelPoint mpeu_model(PureState input, RealVec theta) {
  ModelPoint m{ModelKind::kMpeu, commuting_generators(input.dim()), std::move(input), std::move(theta)};
  validate_model(m);
  return m;
}

ModelPoint mpee_model(BipartiteState input, RealVec theta) {
  ModelPoint m{ModelKind::kMpee, commuting_generators(input.d), std::move(input), std::move(theta)};
  validate_model(m);
  return m;
}

ModelPoint full_model(BipartiteState input, RealVec theta) {
  ModelPoint m{ModelKind::kFull, su_basis(input.d), std::move(input), std::move(theta)};
  validate_model(m);
  return m;
}

void validate_model(const ModelPoint& m) {
  const bool wants_pure = (m.kind == ModelKind::kMpeu);
  if (wants_pure != std::holds_alternative<PureState>(m.input)) {
    throw std::invalid_argument("model: input state kind does not match model kind");
  }
  const int d = wants_pure ? std::get<PureState>(m.input).dim() : std::get<BipartiteState>(m.input).d;
  if (m.gens.d != d) {
    throw std::invalid_argument("model: generator dimension does not match input state");
  }
  const bool wants_full = (m.kind == ModelKind::kFull);
  if (wants_full != (m.gens.kind == GeneratorKind::kFull)) {
    throw std::invalid_argument("model: generator set kind does not match model kind");
  }
  if (m.theta.size() != m.gens.count()) {
    throw std::invalid_argument("model: theta length does not match parameter count");
  }
}

int parameter_count(const ModelPoint& m) { return m.gens.count(); }

int joint_dim(const ModelPoint& m) {
  const int d = m.gens.d;
  return m.kind == ModelKind::kMpeu ? d : d * d;
}

Vec input_amplitudes(const ModelPoint& m) {
  if (const auto* p = std::get_if<PureState>(&m.input)) return p->amps;
  return std::get<BipartiteState>(m.input).amps;
}

Mat model_unitary(const ModelPoint& m) {
  const int d = m.gens.d;
  if (m.kind == ModelKind::kFull) {
    Mat a = Mat::Zero(d, d);
    for (int al = 0; al < m.gens.count(); ++al) a += m.theta[al] * m.gens.mats[al];
    const Mat v = unitary_exp(a);
    return tensor(v, Mat::Identity(d, d));
  }
  // Commuting kinds act diagonally in the computational basis.
  const RealVec angles = m.gens.coeffs.transpose() * m.theta;  // length d
  Mat u = Mat::Zero(joint_dim(m), joint_dim(m));
  for (int j = 0; j < joint_dim(m); ++j) {
    const int k = (m.kind == ModelKind::kMpeu) ? j : j / d;
    u(j, j) = std::polar(1.0, angles[k]);
  }
  return u;
}

Vec output_state(const ModelPoint& m) {
  validate_model(m);
  const Vec in = input_amplitudes(m);
  if (m.kind == ModelKind::kFull) {
    return model_unitary(m) * in;
  }
  const int d = m.gens.d;
  const RealVec angles = m.gens.coeffs.transpose() * m.theta;
  Vec out(in.size());
  for (Eigen::Index j = 0; j < in.size(); ++j) {
    const int k = (m.kind == ModelKind::kMpeu) ? static_cast<int>(j) : static_cast<int>(j) / d;
    out[j] = std::polar(1.0, angles[k]) * in[j];
  }
  return out;
}

std::vector<Mat> effective_generators(const ModelPoint& m) {
  validate_model(m);
  const int d = m.gens.d;
  std::vector<Mat> gs;
  gs.reserve(m.gens.count());
  switch (m.kind) {
    case ModelKind::kMpeu:
      for (const Mat& t : m.gens.mats) gs.push_back(t);
      break;
    case ModelKind::kMpee:
      for (const Mat& t : m.gens.mats) gs.push_back(tensor(t, Mat::Identity(d, d)));
      break;
    case ModelKind::kFull: {
      Mat a = Mat::Zero(d, d);
      for (int al = 0; al < m.gens.count(); ++al) a += m.theta[al] * m.gens.mats[al];
      const Mat v = unitary_exp(a);
      const std::vector<Mat> ss = s_matrices(m.gens, m.theta);
      for (const Mat& s : ss) gs.push_back(tensor(v * s * v.adjoint(), Mat::Identity(d, d)));
      break;
    }
  }
  return gs;
}

std::vector<Vec> l_vectors(const ModelPoint& m) {
  const Vec psi = output_state(m);
  const std::vector<Mat> gs = effective_generators(m);
  std::vector<Vec> ls;
  ls.reserve(gs.size());
  for (const Mat& g : gs) {
    const Vec gpsi = g * psi;
    const Complex mean = psi.dot(gpsi);
    ls.push_back(2.0 * kI * (gpsi - mean * psi));
  }
  return ls;
}

QfiMatrix qfi(const ModelPoint& m) {
  return symmetrized(l_gram(m).real());
}

double qfi_trace_formula(const BipartiteState& s, const GeneratorSet& gens) {
  if (gens.kind != GeneratorKind::kCommuting || gens.d != s.d) {
    throw std::invalid_argument("qfi_trace_formula: need matching commuting generators");
  }
  const RealVec t = hs_coefficients(s.reduced_a(), gens);
  const int d = s.d;
  return 4.0 * (double(d - 1) / d - t.squaredNorm());
}

double quasiclassicality_witness(const ModelPoint& m) {
  return l_gram(m).imag().cwiseAbs().maxCoeff();
}

std::vector<Mat> s_matrices(const GeneratorSet& basis, const RealVec& theta) {
  if (basis.kind != GeneratorKind::kFull) {
    throw std::invalid_argument("s_matrices: need a full generator basis");
  }
  if (theta.size() != basis.count()) {
    throw std::invalid_argument("s_matrices: theta length does not match basis size");
  }
  const int d = basis.d;
  Mat a = Mat::Zero(d, d);
  for (int al = 0; al < basis.count(); ++al) a += theta[al] * basis.mats[al];
  const Mat v = unitary_exp(a);
  std::vector<Mat> out;
  out.reserve(basis.count());
  for (int al = 0; al < basis.count(); ++al) {
    const Mat dv = exp_frechet(a, basis.mats[al]);
    Mat s = -kI * (v.adjoint() * dv);
    if (!is_hermitian(s, 1e-8) || std::abs(s.trace()) > 1e-8) {
      throw std::runtime_error("s_matrices: log-derivative generator failed Hermitian/traceless check");
    }
    out.push_back(0.5 * (s + Mat(s.adjoint())));
  }
  return out;
}

QfiMatrix qfi_full(const BipartiteState& s, const GeneratorSet& basis, const RealVec& theta) {
  const std::vector<Mat> ss = s_matrices(basis, theta);
  const Mat rho_a = s.reduced_a();
  const int n = static_cast<int>(ss.size());
  RealVec t(n);
  std::vector<Mat> rho_s(n);
  for (int al = 0; al < n; ++al) {
    rho_s[al] = rho_a * ss[al];
    t[al] = rho_s[al].trace().real();
  }
  QfiMatrix h(n, n);
  for (int al = 0; al < n; ++al) {
    for (int be = 0; be < n; ++be) {
      h(al, be) = 4.0 * ((rho_s[al] * ss[be]).trace().real() - t[al] * t[be]);
    }
  }
  return symmetrized(h);
}

double trace_bound_ratio(const BipartiteState& s, const GeneratorSet& basis, const RealVec& theta) {
  const QfiMatrix h_rho = qfi_full(s, basis, theta);
  const QfiMatrix h_ref = qfi_full(maximally_entangled(s.d), basis, theta);
  const RealMat inv = inverse_reference(h_ref, "trace_bound_ratio");
  return (inv * h_rho).trace();
}

double casimir_residual(const GeneratorSet& basis, const RealVec& theta) {
  const std::vector<Mat> ss = s_matrices(basis, theta);
  const int d = basis.d;
  const int n = static_cast<int>(ss.size());
  QfiMatrix h_ref(n, n);
  for (int al = 0; al < n; ++al) {
    for (int be = 0; be < n; ++be) {
      h_ref(al, be) = (4.0 / d) * (ss[al] * ss[be]).trace().real();
    }
  }
  const RealMat inv = inverse_reference(symmetrized(h_ref), "casimir_residual");
  Mat c = Mat::Zero(d, d);
  for (int al = 0; al < n; ++al) {
    for (int be = 0; be < n; ++be) {
      c += inv(al, be) * (ss[al] * ss[be]);
    }
  }
  c -= (double(d * d - 1) / 4.0) * Mat::Identity(d, d);
  return c.cwiseAbs().maxCoeff();
}

}  // namespace phaseest
