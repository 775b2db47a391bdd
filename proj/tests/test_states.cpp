#include <doctest.h>

#include <cmath>
#include <numbers>

#include "phaseest/qfi.hpp"
#include "phaseest/states.hpp"
#include "test_support.hpp"

using namespace phaseest;
using namespace testsupport;

TEST_SUITE("states") {

TEST_CASE("phase state basics") {
  const PureState s = phase_state(2, RealVec::Zero(2));
  CHECK(std::abs(s.amps[0] - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(s.amps[1] - 1.0 / std::sqrt(2.0)) < 1e-15);

  RealVec phases(3);
  phases << 0.3, -1.2, 2.9;
  const PureState t = phase_state(3, phases);
  for (int k = 0; k < 3; ++k) CHECK(std::norm(t.amps[k]) == doctest::Approx(1.0 / 3).epsilon(1e-14));

  CHECK_THROWS_AS(phase_state(3, RealVec::Zero(2)), std::invalid_argument);
}

TEST_CASE("every phase state has vanishing generator expectations") {
  RealVec phases(4);
  phases << 0, std::numbers::pi / 2, std::numbers::pi, 3 * std::numbers::pi / 2;
  const PureState s = phase_state(4, phases);
  const GeneratorSet g = commuting_generators(4);
  for (const Mat& t : g.mats) {
    CHECK(std::abs(s.amps.dot(t * s.amps)) < 1e-14);
  }
}

TEST_CASE("maximally entangled state") {
  const BipartiteState s = maximally_entangled(2);
  CHECK(std::abs(s.amps[0] - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(s.amps[3] - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(s.amps[1]) + std::abs(s.amps[2]) == 0.0);

  for (int d = 2; d <= 5; ++d) {
    const BipartiteState m = maximally_entangled(d);
    CHECK(max_abs(m.reduced_a() - Mat::Identity(d, d) / double(d)) < 1e-14);
    const RealVec t = bloch_coefficients(m, su_basis(d));
    CHECK(t.cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("bloch coefficient of |00> against the diagonal generator") {
  Vec amps = Vec::Zero(4);
  amps[0] = 1.0;
  const BipartiteState s = make_bipartite(2, amps);
  const RealVec t = bloch_coefficients(s, su_basis(2));
  CHECK(t[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(std::abs(t[1]) < 1e-14);
  CHECK(std::abs(t[2]) < 1e-14);
}

TEST_CASE("bloch coefficients rebuild the reduced state") {
  Rng rng(303);
  for (int d = 2; d <= 4; ++d) {
    const GeneratorSet basis = su_basis(d);
    for (int rep = 0; rep < 10; ++rep) {
      const BipartiteState s = random_bipartite(d, rng);
      const RealVec t = bloch_coefficients(s, basis);
      Mat rebuilt = Mat::Identity(d, d) / double(d);
      for (int al = 0; al < basis.count(); ++al) rebuilt += t[al] * basis.mats[al];
      CHECK(max_abs(rebuilt - s.reduced_a()) < 1e-10);
    }
  }
}

TEST_CASE("bloch coefficients reject a commuting-only basis") {
  const BipartiteState s = maximally_entangled(3);
  CHECK_THROWS_AS(bloch_coefficients(s, commuting_generators(3)), std::invalid_argument);
}

TEST_CASE("mpeu equivalent of the maximally entangled state is the phase state") {
  for (int d = 2; d <= 5; ++d) {
    const PureState eq = mpeu_equivalent(maximally_entangled(d));
    const PureState ps = phase_state(d, RealVec::Zero(d));
    CHECK((eq.amps - ps.amps).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("mpeu equivalent of a diagonal coefficient matrix") {
  Vec amps = Vec::Zero(4);
  amps[0] = std::sqrt(0.7);
  amps[3] = std::sqrt(0.3);
  const PureState eq = mpeu_equivalent(make_bipartite(2, amps));
  CHECK(std::abs(eq.amps[0] - std::sqrt(0.7)) < 1e-14);
  CHECK(std::abs(eq.amps[1] - std::sqrt(0.3)) < 1e-14);
}

TEST_CASE("mpeu equivalent reproduces the bipartite QFI") {
  Rng rng(304);
  for (int d = 2; d <= 4; ++d) {
    for (int rep = 0; rep < 20; ++rep) {
      const BipartiteState s = random_bipartite(d, rng);
      const RealVec theta = random_theta(d - 1, std::numbers::pi, rng);
      RealVec phases(d);
      for (int k = 0; k < d; ++k) phases[k] = (rng.uniform() - 0.5) * 4.0;
      const QfiMatrix h_ent = qfi(mpee_model(s, theta));
      const QfiMatrix h_single = qfi(mpeu_model(mpeu_equivalent(s, phases), theta));
      CHECK(max_abs(RealMat(h_ent - h_single)) < 1e-10);
    }
  }
}

TEST_CASE("zero diagonal entries give zero amplitudes, not errors") {
  Vec amps = Vec::Zero(4);
  amps[2] = 1.0;  // R = |1><0|: first row of RR† is empty
  const PureState eq = mpeu_equivalent(make_bipartite(2, amps));
  CHECK(std::abs(eq.amps[0]) == 0.0);
  CHECK(std::abs(eq.amps[1] - 1.0) < 1e-14);
}

TEST_CASE("random states are deterministic per seed and normalized") {
  Rng a(99), b(99), c(100);
  const PureState s1 = random_pure(4, a);
  const PureState s2 = random_pure(4, b);
  const PureState s3 = random_pure(4, c);
  CHECK((s1.amps - s2.amps).cwiseAbs().maxCoeff() == 0.0);
  CHECK((s1.amps - s3.amps).cwiseAbs().maxCoeff() > 0.0);
  CHECK(std::abs(s1.amps.norm() - 1.0) < 1e-12);

  Rng ra(7), rb(7);
  const BipartiteState b1 = random_bipartite(3, ra);
  const BipartiteState b2 = random_bipartite(3, rb);
  CHECK((b1.amps - b2.amps).cwiseAbs().maxCoeff() == 0.0);
  CHECK(std::abs(b1.amps.norm() - 1.0) < 1e-12);
}

TEST_CASE("Haar moment: mean |amp_0|^2 is 1/d") {
  const int d = 3;
  const int samples = 100000;
  Rng rng(2024);
  double mean = 0.0;
  for (int i = 0; i < samples; ++i) {
    mean += std::norm(random_pure(d, rng).amps[0]);
  }
  mean /= samples;
  // var(|a0|^2) = (d-1)/(d^2 (d+1)) for Haar states
  const double sigma = std::sqrt((d - 1.0) / (double(d) * d * (d + 1)) / samples);
  CHECK(std::abs(mean - 1.0 / d) < 3.0 * sigma);
}

TEST_CASE("make_pure rejects unnormalized amplitudes") {
  Vec amps(2);
  amps << 1.0, 1.0;
  CHECK_THROWS_AS(make_pure(amps), std::invalid_argument);
}

}  // TEST_SUITE
