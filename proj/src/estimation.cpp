#include "phaseest/estimation.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace phaseest {

namespace {

constexpr long long kBlockSize = 64;

double overlap_sq(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("fidelity: dimension mismatch");
  }
  return std::norm(a.dot(b));
}

RealVec clamp_to_box(const RealVec& x, const RealVec& lo, const RealVec& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

int worker_count(long long blocks) {
  long long n = std::thread::hardware_concurrency();
  if (const char* env = std::getenv("PHASEEST_THREADS")) {
    const long long parsed = std::atoll(env);
    if (parsed > 0) n = parsed;
  }
  if (n < 1) n = 1;
  return static_cast<int>(std::min(n, blocks));
}

}  // namespace

double fidelity(const PureState& a, const PureState& b) { return overlap_sq(a.amps, b.amps); }

double fidelity(const BipartiteState& a, const BipartiteState& b) {
  return overlap_sq(a.amps, b.amps);
}

std::vector<long long> sample_outcomes(const OutcomeDistribution& dist, long long n, Rng& rng) {
  return multinomial_sample(n, dist.probabilities, rng);
}

OutcomeModel::OutcomeModel(const ModelPoint& family, const Povm& povm) {
  validate_model(family);
  if (family.kind == ModelKind::kFull) {
    throw std::invalid_argument("OutcomeModel: only the commuting-generator models are supported");
  }
  const int d = family.gens.d;
  const int jd = joint_dim(family);
  if (povm.dim != jd) {
    throw std::invalid_argument("OutcomeModel: POVM dimension does not match model");
  }
  const int p = family.gens.count();
  exponents_.resize(p, jd);
  for (int m = 0; m < p; ++m) {
    for (int j = 0; j < jd; ++j) {
      const int k = (family.kind == ModelKind::kMpeu) ? j : j / d;
      exponents_(m, j) = family.gens.coeffs(m, k);
    }
  }
  psi0_ = input_amplitudes(family);
  labels_ = povm.labels;
  terms_.resize(povm.elements.size());
  for (std::size_t xi = 0; xi < povm.elements.size(); ++xi) {
    const HermitianEig eig = hermitian_eig(povm.elements[xi]);
    for (Eigen::Index r = 0; r < eig.eigenvalues.size(); ++r) {
      if (eig.eigenvalues[r] > 1e-12) {
        terms_[xi].push_back({eig.eigenvalues[r], eig.eigenvectors.col(r)});
      }
    }
  }
}

Vec OutcomeModel::state_at(const RealVec& theta) const {
  const RealVec angles = exponents_.transpose() * theta;
  Vec psi(psi0_.size());
  for (Eigen::Index j = 0; j < psi.size(); ++j) {
    psi[j] = std::polar(1.0, angles[j]) * psi0_[j];
  }
  return psi;
}

void OutcomeModel::probabilities(const RealVec& theta, RealVec& probs) const {
  const Vec psi = state_at(theta);
  probs.resize(outcome_count());
  for (int xi = 0; xi < outcome_count(); ++xi) {
    double prob = 0.0;
    for (const RankTerm& t : terms_[xi]) prob += t.weight * std::norm(t.vec.dot(psi));
    probs[xi] = prob;
  }
}

void OutcomeModel::probabilities_and_gradients(const RealVec& theta, RealVec& probs,
                                               RealMat& grads) const {
  const Vec psi = state_at(theta);
  const int p = parameter_count();
  probs.resize(outcome_count());
  grads.resize(p, outcome_count());
  Vec z(psi.size());
  for (int xi = 0; xi < outcome_count(); ++xi) {
    double prob = 0.0;
    RealVec grad = RealVec::Zero(p);
    for (const RankTerm& t : terms_[xi]) {
      const Complex amp = t.vec.dot(psi);
      prob += t.weight * std::norm(amp);
      z = t.vec.conjugate().cwiseProduct(psi);
      const Vec slopes = exponents_ * z;  // Σ_j C(m,j) conj(v_j) psi_j
      for (int m = 0; m < p; ++m) {
        grad[m] += -2.0 * t.weight * (std::conj(amp) * slopes[m]).imag();
      }
    }
    probs[xi] = prob;
    grads.col(xi) = grad;
  }
}

namespace {

struct Objective {
  const OutcomeModel& model;
  const RealVec& counts;

  double value(const RealVec& theta, RealVec& probs) const {
    model.probabilities(theta, probs);
    double ll = 0.0;
    for (Eigen::Index xi = 0; xi < probs.size(); ++xi) {
      if (counts[xi] > 0.0) ll += counts[xi] * std::log(std::max(probs[xi], kProbFloor));
    }
    return ll;
  }

  double value_and_gradient(const RealVec& theta, RealVec& probs, RealMat& grads,
                            RealVec& grad_out) const {
    model.probabilities_and_gradients(theta, probs, grads);
    double ll = 0.0;
    grad_out = RealVec::Zero(model.parameter_count());
    for (Eigen::Index xi = 0; xi < probs.size(); ++xi) {
      if (counts[xi] > 0.0) {
        const double prob = std::max(probs[xi], kProbFloor);
        ll += counts[xi] * std::log(prob);
        grad_out += (counts[xi] / prob) * grads.col(xi);
      }
    }
    return ll;
  }
};

struct AscentRun {
  RealVec theta;
  double ll = 0.0;
  double gradient_norm = 0.0;
  bool grad_converged = false;
  int iterations = 0;
};

AscentRun ascend(const Objective& obj, const RealVec& start, const RealVec& lo, const RealVec& hi,
                 const MleOptions& opts, double scale) {
  RealVec probs;
  RealMat grads;
  RealVec grad;
  AscentRun run;
  run.theta = clamp_to_box(start, lo, hi);
  run.ll = obj.value_and_gradient(run.theta, probs, grads, grad);
  double step = 1.0 / scale;
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    run.gradient_norm = grad.norm();
    run.iterations = iter;
    if (run.gradient_norm < opts.gradient_tol) {
      run.grad_converged = true;
      return run;
    }
    // Below this the objective cannot certify progress in double precision;
    // the gradient (analytic, noise floor far lower) takes over.
    const double resolution = 1e-12 * (1.0 + std::abs(run.ll));

    bool accepted = false;
    RealVec cand, cand_grad;
    double cand_ll = 0.0;
    for (int halving = 0; halving < 60 && !accepted; ++halving) {
      cand = clamp_to_box(run.theta + step * grad, lo, hi);
      const RealVec delta = cand - run.theta;
      if (delta.cwiseAbs().maxCoeff() < 1e-18) break;  // pinned against the box
      cand_ll = obj.value_and_gradient(cand, probs, grads, cand_grad);
      const double gain = cand_ll - run.ll;
      if (gain >= std::max(0.5 * grad.dot(delta), resolution)) {
        accepted = true;
        break;
      }
      if (std::abs(gain) <= resolution) {
        // Flat at fp resolution: the probe's gradient gives the curvature
        // along the ray, and the secant step is the exact line-search
        // maximizer of the local quadratic.
        const double denom = (grad - cand_grad).dot(grad);
        if (denom > 0.0) {
          const double t_star = step * grad.squaredNorm() / denom;
          const RealVec refined = clamp_to_box(run.theta + t_star * grad, lo, hi);
          RealVec refined_grad;
          const double refined_ll = obj.value_and_gradient(refined, probs, grads, refined_grad);
          if (refined_ll >= run.ll - resolution && refined_grad.norm() < cand_grad.norm()) {
            cand = refined;
            cand_ll = refined_ll;
            cand_grad = refined_grad;
          }
        }
        if (cand_grad.norm() < run.gradient_norm) {
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) {
      return run;  // no certifiable step at representable sizes
    }
    run.theta = cand;
    run.ll = cand_ll;
    grad = cand_grad;
    step *= 2.0;
  }
  run.gradient_norm = grad.norm();
  run.iterations = opts.max_iterations;
  return run;
}

}  // namespace

MleResult mle(const RealVec& counts, const OutcomeModel& model, const RealVec& center,
              const MleOptions& opts) {
  if (counts.size() != model.outcome_count()) {
    throw std::invalid_argument("mle: counts length does not match outcome count");
  }
  const int p = model.parameter_count();
  if (center.size() != p) {
    throw std::invalid_argument("mle: search center length does not match parameter count");
  }
  const RealVec lo = center.array() - opts.box_half_width;
  const RealVec hi = center.array() + opts.box_half_width;
  const double scale = std::max(1.0, counts.sum());
  const Objective obj{model, counts};

  std::vector<RealVec> starts;
  starts.push_back(center);
  for (int j = 0; j < opts.extra_starts; ++j) {
    RealVec s = center;
    const int axis = j % p;
    const double sign = ((j / p) % 2 == 0) ? 1.0 : -1.0;
    s[axis] += sign * opts.start_radius;
    starts.push_back(s);
  }

  std::vector<AscentRun> runs;
  runs.reserve(starts.size());
  for (const RealVec& s : starts) runs.push_back(ascend(obj, s, lo, hi, opts, scale));

  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].ll > runs[best].ll) best = r;
  }

  // A flat likelihood leaves several starts tied at separated points; that is
  // an unidentifiable fit, not a convergence.
  bool ambiguous = false;
  const double tie_tol = 1e-9 * (1.0 + std::abs(runs[best].ll));
  for (std::size_t r = 0; r < runs.size(); ++r) {
    if (r == best) continue;
    if (std::abs(runs[r].ll - runs[best].ll) <= tie_tol &&
        (runs[r].theta - runs[best].theta).cwiseAbs().maxCoeff() > 1e-3) {
      ambiguous = true;
      break;
    }
  }

  MleResult result;
  result.theta = runs[best].theta;
  result.iterations = runs[best].iterations;
  result.gradient_norm = runs[best].gradient_norm;
  result.log_likelihood = runs[best].ll;
  result.converged = runs[best].grad_converged && !ambiguous;
  return result;
}

MleResult mle(const RealVec& counts, const ModelPoint& family, const Povm& povm,
              const RealVec& center, const MleOptions& opts) {
  return mle(counts, OutcomeModel(family, povm), center, opts);
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.d < 2) throw std::invalid_argument("config: d must be >= 2");
  if (cfg.kind == ModelKind::kFull) {
    throw std::invalid_argument("config: only the commuting-generator models can be simulated");
  }
  if (cfg.n_copies < 1) throw std::invalid_argument("config: N must be >= 1");
  if (cfg.trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (cfg.theta.size() != 0 && cfg.theta.size() != cfg.d - 1) {
    throw std::invalid_argument("config: theta length must be d-1");
  }
  const bool pure_model = (cfg.kind == ModelKind::kMpeu);
  if (cfg.explicit_pure && !pure_model) {
    throw std::invalid_argument("config: pure state given for a bipartite model");
  }
  if (cfg.explicit_bipartite && pure_model) {
    throw std::invalid_argument("config: bipartite state given for a single-system model");
  }
  if (!cfg.explicit_pure && !cfg.explicit_bipartite && cfg.state_spec != "optimal" &&
      cfg.state_spec != "maxent" && cfg.state_spec != "random") {
    throw std::invalid_argument("config: state must be optimal, maxent, random, or explicit");
  }
  if (!cfg.explicit_povm && cfg.povm_spec != "optimal" && cfg.povm_spec != "locc") {
    throw std::invalid_argument("config: povm must be optimal, locc, or explicit");
  }
  if (cfg.povm_spec == "locc" && pure_model && !cfg.explicit_povm) {
    throw std::invalid_argument("config: the locc measurement needs the bipartite model");
  }
}

ModelPoint build_model(const ExperimentConfig& cfg) {
  validate_config(cfg);
  RealVec theta = cfg.theta.size() ? cfg.theta : RealVec::Zero(cfg.d - 1);
  // Reserved substream index, clear of the per-trial range.
  Rng rng = Rng::substream(cfg.seed, 0xFFFFFFFFFFFFFFFFull);
  if (cfg.kind == ModelKind::kMpeu) {
    PureState input = cfg.explicit_pure               ? *cfg.explicit_pure
                      : (cfg.state_spec == "random")  ? random_pure(cfg.d, rng)
                      : (cfg.state_spec == "maxent")
                          ? mpeu_equivalent(maximally_entangled(cfg.d))
                          : phase_state(cfg.d, RealVec::Zero(cfg.d));
    return mpeu_model(std::move(input), std::move(theta));
  }
  BipartiteState input = cfg.explicit_bipartite      ? *cfg.explicit_bipartite
                         : (cfg.state_spec == "random") ? random_bipartite(cfg.d, rng)
                                                        : maximally_entangled(cfg.d);
  return mpee_model(std::move(input), std::move(theta));
}

Povm build_povm(const ExperimentConfig& cfg) {
  validate_config(cfg);
  if (cfg.explicit_povm) return *cfg.explicit_povm;
  if (cfg.povm_spec == "locc") return locc_povm_mpee(cfg.d);
  Povm alice = optimal_povm_mpeu(cfg.d, RealVec::Zero(cfg.d), cfg.eta);
  if (cfg.kind == ModelKind::kMpeu) return alice;
  // Bipartite model with the single-system recipe: measure the first factor,
  // ignore the second.
  Povm out;
  out.dim = cfg.d * cfg.d;
  out.labels = alice.labels;
  for (const Mat& e : alice.elements) {
    out.elements.push_back(tensor(e, Mat::Identity(cfg.d, cfg.d)));
  }
  return out;
}

namespace {

struct BlockAccumulator {
  long long tried = 0;
  long long failed = 0;
  RealVec sum_estimate;
  RealMat sum_outer;
  double sum_fidelity = 0.0;

  explicit BlockAccumulator(int p)
      : sum_estimate(RealVec::Zero(p)), sum_outer(RealMat::Zero(p, p)) {}
};

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const ModelPoint model = build_model(cfg);
  const Povm povm = build_povm(cfg);
  const OutcomeModel outcome_model(model, povm);
  const int p = outcome_model.parameter_count();
  const RealVec theta_true = model.theta;

  RealVec probs_true;
  outcome_model.probabilities(theta_true, probs_true);
  const Vec psi_true = outcome_model.state_at(theta_true);

  const long long blocks = (cfg.trials + kBlockSize - 1) / kBlockSize;
  std::vector<BlockAccumulator> accs(static_cast<std::size_t>(blocks), BlockAccumulator(p));
  std::vector<RealVec> estimates;
  if (cfg.dump_estimates) estimates.assign(static_cast<std::size_t>(cfg.trials), RealVec());

  std::atomic<long long> next_block{0};
  auto worker = [&]() {
    RealVec counts_real(outcome_model.outcome_count());
    for (;;) {
      const long long b = next_block.fetch_add(1);
      if (b >= blocks) return;
      BlockAccumulator& acc = accs[static_cast<std::size_t>(b)];
      const long long t_end = std::min(cfg.trials, (b + 1) * kBlockSize);
      for (long long t = b * kBlockSize; t < t_end; ++t) {
        Rng rng = Rng::substream(cfg.seed, static_cast<std::uint64_t>(t));
        const std::vector<long long> counts = multinomial_sample(cfg.n_copies, probs_true, rng);
        for (int xi = 0; xi < outcome_model.outcome_count(); ++xi) {
          counts_real[xi] = static_cast<double>(counts[static_cast<std::size_t>(xi)]);
        }
        const MleResult fit = mle(counts_real, outcome_model, theta_true);
        ++acc.tried;
        if (!fit.converged) {
          ++acc.failed;
          if (cfg.dump_estimates) estimates[static_cast<std::size_t>(t)] = fit.theta;
          continue;
        }
        const RealVec dev = fit.theta - theta_true;
        acc.sum_estimate += fit.theta;
        acc.sum_outer += dev * dev.transpose();
        acc.sum_fidelity += std::norm(psi_true.dot(outcome_model.state_at(fit.theta)));
        if (cfg.dump_estimates) estimates[static_cast<std::size_t>(t)] = fit.theta;
      }
    }
  };

  const int n_workers = worker_count(blocks);
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  // Merge in block order: identical result for any worker count.
  BlockAccumulator total(p);
  for (const BlockAccumulator& acc : accs) {
    total.tried += acc.tried;
    total.failed += acc.failed;
    total.sum_estimate += acc.sum_estimate;
    total.sum_outer += acc.sum_outer;
    total.sum_fidelity += acc.sum_fidelity;
  }

  if (static_cast<double>(total.failed) > 0.01 * static_cast<double>(cfg.trials)) {
    throw std::runtime_error("run_experiment: more than 1% of trials failed to converge (" +
                             std::to_string(total.failed) + " of " + std::to_string(cfg.trials) +
                             ")");
  }
  const long long kept = total.tried - total.failed;
  if (kept < 1) throw std::runtime_error("run_experiment: no successful trials");

  ExperimentResult result;
  result.trials = cfg.trials;
  result.n_copies = cfg.n_copies;
  result.failures = total.failed;
  result.mse = total.sum_outer / static_cast<double>(kept);
  result.mean_estimate = total.sum_estimate / static_cast<double>(kept);
  result.avg_fidelity = total.sum_fidelity / static_cast<double>(kept);
  result.scaled_mse = static_cast<double>(cfg.n_copies) * result.mse;
  result.scaled_infidelity = static_cast<double>(cfg.n_copies) * (1.0 - result.avg_fidelity);
  if (cfg.dump_estimates) result.estimates = std::move(estimates);
  return result;
}

}  // namespace phaseest
