#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "phaseest/fisher.hpp"
#include "phaseest/measurement.hpp"
#include "phaseest/qfi.hpp"
#include "phaseest/rng.hpp"

namespace phaseest {

/// |<a|b>|^2 for pure states of equal dimension.
double fidelity(const PureState& a, const PureState& b);
double fidelity(const BipartiteState& a, const BipartiteState& b);

/// One multinomial draw of n outcomes from the distribution, in label order.
std::vector<long long> sample_outcomes(const OutcomeDistribution& dist, long long n, Rng& rng);

/// Fast outcome probabilities/gradients for the commuting-generator models,
/// where the evolution is a diagonal phase action. Equals the operator-path
/// outcome_distribution at every theta; thread-safe once built.
class OutcomeModel {
 public:
  OutcomeModel(const ModelPoint& family, const Povm& povm);

  int parameter_count() const { return static_cast<int>(exponents_.rows()); }
  int outcome_count() const { return static_cast<int>(terms_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }

  Vec state_at(const RealVec& theta) const;
  void probabilities(const RealVec& theta, RealVec& probs) const;
  void probabilities_and_gradients(const RealVec& theta, RealVec& probs, RealMat& grads) const;

 private:
  struct RankTerm {
    double weight;
    Vec vec;
  };
  RealMat exponents_;  // p x joint_dim: phase slope per parameter and index
  Vec psi0_;
  std::vector<std::vector<RankTerm>> terms_;  // spectral terms per outcome
  std::vector<std::string> labels_;
};

struct MleOptions {
  double box_half_width = std::numbers::pi / 2;
  int max_iterations = 500;
  double gradient_tol = 1e-9;
  int extra_starts = 4;    // perturbed starts beyond the center
  double start_radius = 0.1;
};

struct MleResult {
  RealVec theta;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;
  double log_likelihood = 0.0;
};

/// Maximize Σ counts_xi ln p_xi(theta) over the box center ± box_half_width
/// by projected gradient ascent with backtracking, multi-started from the
/// center and four radius-0.1 perturbations. Counts on outcomes whose
/// probability hits the floor are handled by clamping the log argument.
/// Non-convergence (gradient tolerance unmet, or several starts tie at
/// separated maximizers — a flat likelihood) is reported with the best
/// iterate, never thrown.
MleResult mle(const RealVec& counts, const OutcomeModel& model, const RealVec& center,
              const MleOptions& opts = {});
MleResult mle(const RealVec& counts, const ModelPoint& family, const Povm& povm,
              const RealVec& center, const MleOptions& opts = {});

struct ExperimentConfig {
  ModelKind kind = ModelKind::kMpeu;
  int d = 2;
  std::string state_spec = "optimal";  // optimal | maxent | random (or explicit below)
  std::string povm_spec = "optimal";   // optimal | locc (or explicit below)
  std::optional<PureState> explicit_pure;
  std::optional<BipartiteState> explicit_bipartite;
  std::optional<Povm> explicit_povm;
  std::optional<double> eta;  // d = 2 measurement angle
  RealVec theta;              // true parameter (empty = zeros)
  long long n_copies = 1;
  long long trials = 1;
  std::uint64_t seed = 0;
  bool dump_estimates = false;
};

void validate_config(const ExperimentConfig& cfg);

/// Model at the true theta and the measurement, resolved from the specs.
ModelPoint build_model(const ExperimentConfig& cfg);
Povm build_povm(const ExperimentConfig& cfg);

struct ExperimentResult {
  RealMat mse;               // V = E[(est - theta)(est - theta)^T]
  RealVec mean_estimate;
  double avg_fidelity = 1.0;
  RealMat scaled_mse;        // N * V
  double scaled_infidelity = 0.0;  // N * (1 - F)
  long long failures = 0;
  long long trials = 0;
  long long n_copies = 0;
  std::vector<RealVec> estimates;  // per trial, when dump_estimates
};

/// Repeat trials times: draw N outcomes, fit the MLE near the true theta,
/// accumulate the error matrix and the output-state fidelity. Trials run on
/// per-trial RNG substreams in fixed blocks, so the result is bit-identical
/// for any worker count (PHASEEST_THREADS overrides the default). Throws if
/// more than 1% of trials fail to converge.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace phaseest
