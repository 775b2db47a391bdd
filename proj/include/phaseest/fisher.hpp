#pragma once

#include <string>
#include <vector>

#include "phaseest/measurement.hpp"
#include "phaseest/qfi.hpp"

namespace phaseest {

/// Outcome floor below which a probability is treated as zero, and the
/// gradient magnitude above which such an outcome is a genuine divergence
/// rather than a removable 0/0.
inline constexpr double kProbFloor = 1e-12;
inline constexpr double kGradFloor = 1e-9;

struct OutcomeDistribution {
  std::vector<std::string> labels;
  RealVec probabilities;  // one per outcome, nonnegative, sums to 1
  RealMat gradients;      // p x n, column per outcome; columns sum to zero
};

/// p_xi = tr(rho(theta) M_xi) with analytic theta-gradients from
/// d rho = i [G_m, rho]. Probabilities within -1e-12 of zero are clipped.
OutcomeDistribution outcome_distribution(const ModelPoint& m, const Povm& povm);

struct FiMatrix {
  RealMat entries;
  /// Set when some outcome has probability at the floor but a gradient above
  /// it: the information is formally divergent at this point.
  bool singular = false;
};

FiMatrix fi_from_distribution(const OutcomeDistribution& dist);
FiMatrix fi(const ModelPoint& m, const Povm& povm);

struct QcrbGap {
  double min_eigenvalue = 0.0;
  bool singular = false;
};

/// Minimum eigenvalue of H - I; nonnegative (to tolerance) for every
/// measurement, and the whole spectrum vanishes for saturating ones.
QcrbGap qcrb_gap(const ModelPoint& m, const Povm& povm);

}  // namespace phaseest
