#include "phaseest/fisher.hpp"

#include <cmath>
#include <stdexcept>

namespace phaseest {

OutcomeDistribution outcome_distribution(const ModelPoint& m, const Povm& povm) {
  if (povm.dim != joint_dim(m)) {
    throw std::invalid_argument("outcome_distribution: POVM dimension does not match model");
  }
  const Vec psi = output_state(m);
  const std::vector<Mat> gens = effective_generators(m);
  const int p = parameter_count(m);
  const int n = povm.size();

  OutcomeDistribution dist;
  dist.labels = povm.labels;
  dist.probabilities.resize(n);
  dist.gradients.resize(p, n);
  std::vector<Vec> gen_psi(gens.size());
  for (int g = 0; g < p; ++g) gen_psi[g] = gens[g] * psi;

  for (int xi = 0; xi < n; ++xi) {
    const Vec mpsi = povm.elements[xi] * psi;
    const double prob = psi.dot(mpsi).real();
    if (prob < -kProbFloor) {
      throw std::invalid_argument("outcome_distribution: negative outcome probability");
    }
    dist.probabilities[xi] = std::max(prob, 0.0);
    for (int g = 0; g < p; ++g) {
      // tr(i[G, rho] M) = 2 Im <psi|G M|psi>
      dist.gradients(g, xi) = 2.0 * (gen_psi[g].dot(mpsi)).imag();
    }
  }
  return dist;
}

FiMatrix fi_from_distribution(const OutcomeDistribution& dist) {
  const int p = static_cast<int>(dist.gradients.rows());
  FiMatrix out;
  out.entries = RealMat::Zero(p, p);
  for (Eigen::Index xi = 0; xi < dist.probabilities.size(); ++xi) {
    const double prob = dist.probabilities[xi];
    const RealVec g = dist.gradients.col(xi);
    if (prob > kProbFloor) {
      out.entries += (g * g.transpose()) / prob;
    } else if (g.cwiseAbs().maxCoeff() > kGradFloor) {
      out.singular = true;
    }
  }
  out.entries = 0.5 * (out.entries + RealMat(out.entries.transpose()));
  return out;
}

FiMatrix fi(const ModelPoint& m, const Povm& povm) {
  return fi_from_distribution(outcome_distribution(m, povm));
}

QcrbGap qcrb_gap(const ModelPoint& m, const Povm& povm) {
  const QfiMatrix h = qfi(m);
  const FiMatrix info = fi(m, povm);
  Eigen::SelfAdjointEigenSolver<RealMat> es(h - info.entries, Eigen::EigenvaluesOnly);
  return QcrbGap{es.eigenvalues().minCoeff(), info.singular};
}

}  // namespace phaseest
