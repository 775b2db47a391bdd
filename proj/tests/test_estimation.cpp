#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>

#include "phaseest/estimation.hpp"
#include "phaseest/serialize.hpp"
#include "test_support.hpp"

using namespace phaseest;
using namespace testsupport;

namespace {

Povm trivial_povm(int dim) {
  Povm p;
  p.dim = dim;
  p.elements.push_back(Mat::Identity(dim, dim));
  p.labels.push_back("1");
  return p;
}

struct ThreadCountGuard {
  explicit ThreadCountGuard(const char* value) { setenv("PHASEEST_THREADS", value, 1); }
  ~ThreadCountGuard() { unsetenv("PHASEEST_THREADS"); }
};

bool results_identical(const ExperimentResult& a, const ExperimentResult& b) {
  return a.failures == b.failures && a.avg_fidelity == b.avg_fidelity &&
         a.scaled_infidelity == b.scaled_infidelity &&
         (a.mse - b.mse).cwiseAbs().maxCoeff() == 0.0 &&
         (a.mean_estimate - b.mean_estimate).cwiseAbs().maxCoeff() == 0.0;
}

}  // namespace

TEST_SUITE("estimation") {

TEST_CASE("fidelity basics and the second-order expansion") {
  Rng rng(51);
  const PureState a = random_pure(3, rng);
  CHECK(fidelity(a, a) == doctest::Approx(1.0).epsilon(1e-14));

  Vec e0 = Vec::Zero(2), e1 = Vec::Zero(2);
  e0[0] = 1.0;
  e1[1] = 1.0;
  CHECK(fidelity(make_pure(e0), make_pure(e1)) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS(fidelity(make_pure(e0), a), std::invalid_argument);

  // F(theta, theta+delta) = 1 - sum H delta delta / 4 + o(delta^2)
  const BipartiteState s = random_bipartite(3, rng);
  const RealVec theta = random_theta(2, 1.0, rng);
  const QfiMatrix h = qfi(mpee_model(s, theta));
  RealVec delta(2);
  delta << 1e-3, -0.7e-3;
  const Vec psi_a = output_state(mpee_model(s, theta));
  const Vec psi_b = output_state(mpee_model(s, RealVec(theta + delta)));
  const double f = std::norm(psi_a.dot(psi_b));
  CHECK(std::abs(f - (1.0 - delta.dot(h * delta) / 4.0)) < 1e-7);
}

TEST_CASE("sampling: degenerate, uniform moments, determinism") {
  OutcomeDistribution degen;
  degen.labels = {"a", "b"};
  degen.probabilities = RealVec(2);
  degen.probabilities << 1.0, 0.0;
  Rng rng(61);
  const auto counts = sample_outcomes(degen, 1000, rng);
  CHECK(counts[0] == 1000);
  CHECK(counts[1] == 0);

  OutcomeDistribution uniform;
  uniform.labels = {"1", "2", "3", "4"};
  uniform.probabilities = RealVec::Constant(4, 0.25);
  Rng rng2(62);
  const auto big = sample_outcomes(uniform, 1000000, rng2);
  const double sigma = std::sqrt(1e6 * 0.25 * 0.75);
  long long total = 0;
  for (long long c : big) {
    CHECK(std::abs(double(c) - 2.5e5) < 5.0 * sigma);
    total += c;
  }
  CHECK(total == 1000000);

  Rng ra(63), rb(63);
  CHECK(sample_outcomes(uniform, 5000, ra) == sample_outcomes(uniform, 5000, rb));
}

TEST_CASE("the fast outcome model matches the operator path") {
  Rng rng(64);
  for (int rep = 0; rep < 6; ++rep) {
    const int d = 2 + rep % 3;
    const bool bipartite = rep % 2 == 0;
    const ModelPoint family = bipartite
                                  ? mpee_model(random_bipartite(d, rng), RealVec::Zero(d - 1))
                                  : mpeu_model(random_pure(d, rng), RealVec::Zero(d - 1));
    const Povm povm = random_basis_povm(bipartite ? d * d : d, rng);
    const OutcomeModel fast(family, povm);
    for (int t = 0; t < 3; ++t) {
      const RealVec theta = random_theta(d - 1, std::numbers::pi, rng);
      ModelPoint at = family;
      at.theta = theta;
      const OutcomeDistribution slow = outcome_distribution(at, povm);
      RealVec probs;
      RealMat grads;
      fast.probabilities_and_gradients(theta, probs, grads);
      CHECK((probs - slow.probabilities).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(max_abs(RealMat(grads - slow.gradients)) < 1e-12);
    }
  }
}

TEST_CASE("population counts are maximized at the truth") {
  Rng rng(65);
  const int d = 3;
  const ModelPoint family = mpeu_model(phase_state(d, RealVec::Zero(d)), RealVec::Zero(d - 1));
  const Povm povm = optimal_povm_mpeu(d);
  const OutcomeModel model(family, povm);
  RealVec truth(2);
  truth << 0.21, -0.34;
  RealVec probs;
  model.probabilities(truth, probs);
  const RealVec counts = 1e4 * probs;
  const MleResult fit = mle(counts, model, truth);
  CHECK(fit.converged);
  CHECK((fit.theta - truth).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("a single-outcome measurement yields a non-convergence report") {
  const ModelPoint family = mpeu_model(phase_state(2, RealVec::Zero(2)), RealVec::Zero(1));
  RealVec counts(1);
  counts << 100.0;
  const MleResult fit = mle(counts, family, trivial_povm(2), RealVec::Zero(1));
  CHECK_FALSE(fit.converged);
  CHECK(fit.theta.size() == 1);  // best iterate still reported
}

TEST_CASE("MLE variance approaches the information bound (d=2)") {
  ExperimentConfig cfg;
  cfg.d = 2;
  cfg.n_copies = 10000;
  cfg.trials = 2000;
  cfg.seed = 20240801;
  const ExperimentResult r = run_experiment(cfg);
  CHECK(r.failures == 0);
  // target N*V = d/4 = 0.5
  CHECK(r.scaled_mse(0, 0) > 0.45);
  CHECK(r.scaled_mse(0, 0) < 0.56);
  CHECK(std::abs(r.mean_estimate[0]) < 3.0 * std::sqrt(0.5 / 1e4 / 2000.0) + 1e-4);

  // N(1-F) tracks tr(H V)/4 = N V * H / 4 with H = 2
  CHECK(r.scaled_infidelity ==
        doctest::Approx(r.scaled_mse(0, 0) / 2.0).epsilon(0.01));
}

TEST_CASE("experiments are deterministic and worker-count independent") {
  ExperimentConfig cfg;
  cfg.d = 3;
  cfg.n_copies = 400;
  cfg.trials = 130;  // half-filled final block
  cfg.seed = 99;
  cfg.dump_estimates = true;

  ExperimentResult a, b, c;
  {
    ThreadCountGuard guard("1");
    a = run_experiment(cfg);
  }
  {
    ThreadCountGuard guard("2");
    b = run_experiment(cfg);
  }
  {
    ThreadCountGuard guard("7");
    c = run_experiment(cfg);
  }
  CHECK(results_identical(a, b));
  CHECK(results_identical(a, c));
  REQUIRE(a.estimates.size() == b.estimates.size());
  for (std::size_t t = 0; t < a.estimates.size(); ++t) {
    CHECK((a.estimates[t] - b.estimates[t]).cwiseAbs().maxCoeff() == 0.0);
  }
  // serialized forms agree byte for byte
  CHECK(result_to_json(cfg, a).dump() == result_to_json(cfg, b).dump());
  CHECK(result_csv_row(cfg, a) == result_csv_row(cfg, b));
}

TEST_CASE("an unidentifiable setup aborts past the failure threshold") {
  ExperimentConfig cfg;
  cfg.d = 2;
  cfg.n_copies = 10;
  cfg.trials = 5;
  cfg.explicit_povm = trivial_povm(2);
  CHECK_THROWS_AS(run_experiment(cfg), std::runtime_error);
}

TEST_CASE("log-likelihood curvature scales linearly in the copy count") {
  const int d = 3;
  const ModelPoint family = mpeu_model(phase_state(d, RealVec::Zero(d)), RealVec::Zero(d - 1));
  const Povm povm = optimal_povm_mpeu(d);
  const OutcomeModel model(family, povm);
  RealVec truth(2);
  truth << 0.1, 0.05;
  RealVec probs;
  model.probabilities(truth, probs);

  auto gradient_at = [&](const RealVec& counts, const RealVec& theta) {
    RealVec pr;
    RealMat gr;
    model.probabilities_and_gradients(theta, pr, gr);
    RealVec g = RealVec::Zero(2);
    for (int xi = 0; xi < int(pr.size()); ++xi) g += (counts[xi] / pr[xi]) * gr.col(xi);
    return g;
  };
  auto curvature = [&](double n) {
    const RealVec counts = n * probs;
    RealMat hess(2, 2);
    const double eps = 1e-6;
    for (int j = 0; j < 2; ++j) {
      RealVec tp = truth, tm = truth;
      tp[j] += eps;
      tm[j] -= eps;
      hess.col(j) = (gradient_at(counts, tp) - gradient_at(counts, tm)) / (2 * eps);
    }
    return RealMat(-0.5 * (hess + RealMat(hess.transpose())));
  };

  const RealMat i1 = curvature(1e3) / 1e3;
  const RealMat i2 = curvature(1e4) / 1e4;
  CHECK(max_abs(RealMat(i1 - i2)) < 1e-6);  // curvature = N * I exactly
  ModelPoint at_truth = family;
  at_truth.theta = truth;
  const FiMatrix direct = fi(at_truth, povm);
  CHECK(max_abs(RealMat(i1 - direct.entries)) < 1e-4);
}

TEST_CASE("suboptimal inputs pay the Cramér-Rao price") {
  Vec amps(2);
  amps << std::sqrt(0.7), std::sqrt(0.3);
  ExperimentConfig cfg;
  cfg.d = 2;
  cfg.explicit_pure = make_pure(amps);
  cfg.n_copies = 5000;
  cfg.trials = 400;
  cfg.seed = 7;
  const ExperimentResult r = run_experiment(cfg);

  const ModelPoint m = mpeu_model(*cfg.explicit_pure, RealVec::Zero(1));
  const double h = qfi(m)(0, 0);  // 1.68 for this input
  CHECK(h == doctest::Approx(1.68).epsilon(1e-12));
  CHECK(r.scaled_mse(0, 0) >= (1.0 / h) * 0.8);
  const double info = fi(m, optimal_povm_mpeu(2)).entries(0, 0);
  CHECK(r.scaled_mse(0, 0) == doctest::Approx(1.0 / info).epsilon(0.2));
  CHECK(r.scaled_mse(0, 0) > 0.5);  // strictly above the optimal-input floor
}

TEST_CASE("bipartite runs check the same asymptotics through the joint state") {
  ExperimentConfig cfg;
  cfg.kind = ModelKind::kMpee;
  cfg.d = 2;
  cfg.state_spec = "maxent";
  cfg.povm_spec = "locc";
  cfg.n_copies = 10000;
  cfg.trials = 300;
  cfg.seed = 11;
  const ExperimentResult r = run_experiment(cfg);
  CHECK(r.failures == 0);
  CHECK(std::abs(r.scaled_mse(0, 0) - 0.5) < 0.125);
  CHECK(std::abs(r.scaled_infidelity - 0.25) < 0.0625);
}

}  // TEST_SUITE
