#include "gsdie/oracle.hpp"

#include "gsdie/errors.hpp"
#include "gsdie/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace gsdie;

TEST_SUITE_BEGIN("oracle");

TEST_CASE("dense operator on the 2-node graph") {
  Matrix w(2, 2);
  w << 0, 1, 1, 0;
  Graph g = Graph::dense(w, Normalization::random_walk);
  Vector mu(2), ft(2);
  mu << 1, 0;
  ft << 1, 0;
  DenseOperator op(g, FidelityData::make(mu, ft));

  // A = [[2,-1],[-1,1]] with eigenvalues (3 +- sqrt 5)/2.
  Matrix expected_a(2, 2);
  expected_a << 2, -1, -1, 1;
  CHECK((op.a_matrix() - expected_a).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(op.xi1() == doctest::Approx((3.0 - std::sqrt(5.0)) / 2.0).epsilon(1e-12));
  CHECK(op.spectrum()(1) == doctest::Approx((3.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-12));

  SplitMix64 rng(1);
  Vector u(2);
  u << rng.uniform01(), rng.uniform01();
  CHECK((op.expm_apply(0.0, u) - u).cwiseAbs().maxCoeff() <= 1e-14);

  // Equilibrium: S_tau(A^{-1} f) = A^{-1} f for every tau.
  const Vector stat = op.ainv_apply(op.fidelity().f);
  for (double tau : {0.05, 0.3, 2.0})
    CHECK((op.exact_S_tau(stat, tau) - stat).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("exact_b agrees with high-resolution quadrature of the dense exponential") {
  SplitMix64 rng(5);
  RandomInstance inst = random_instance(rng, 9, 9, Normalization::random_walk);
  DenseOperator op(inst.graph, inst.fid);
  const double tau = 0.7;
  // Composite Simpson with 4096 panels on t -> e^{-tA} f, an independent
  // route to int_0^tau e^{-tA} f dt.
  const int m = 4096;
  const double h = tau / (2 * m);
  Vector acc = op.fidelity().f + op.expm_apply(tau, op.fidelity().f);
  for (int j = 1; j < 2 * m; ++j)
    acc += (j % 2 == 1 ? 4.0 : 2.0) * op.expm_apply(j * h, op.fidelity().f);
  const Vector quad = (h / 3.0) * acc;
  CHECK((op.exact_b(tau) - quad).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("dense exponential is entrywise nonnegative") {
  CHECK(check_expm_nonnegative(7, 5, 6, 10).pass);
}

TEST_CASE("comparison principle and range preservation") {
  CHECK(check_diffusion_monotone(9, 40, 6, 12).pass);
  CHECK(check_diffusion_range(10, 40, 6, 12).pass);
}

TEST_CASE("ace_reference basics") {
  SplitMix64 rng(11);
  RandomInstance inst = random_instance(rng, 8, 8, Normalization::random_walk);
  DenseOperator op(inst.graph, inst.fid);
  Vector u0(8);
  for (Index i = 0; i < 8; ++i) u0(i) = rng.uniform01();

  const Vector at0 = ace_reference(u0, 0.0, 0.1, op, 0.1 / 64);
  CHECK((at0 - u0).cwiseAbs().maxCoeff() == 0.0);

  // Successive halvings form a Cauchy sequence with first-order gaps.
  const double t = 0.5, eps = 0.1;
  const Vector a = ace_reference(u0, t, eps, op, eps / 64);
  const Vector b = ace_reference(u0, t, eps, op, eps / 128);
  const Vector c = ace_reference(u0, t, eps, op, eps / 256);
  const double g1 = norm_V(a - b, inst.graph);
  const double g2 = norm_V(b - c, inst.graph);
  CHECK(g2 <= 0.75 * g1 + 1e-10);

  CHECK_THROWS_AS(ace_reference(u0, t, eps, op, eps), InputError);
  // eps^{-1} sitting on the spectrum is rejected.
  const double bad_eps = 1.0 / op.spectrum()(3);
  CHECK_THROWS_AS(ace_reference(u0, t, bad_eps, op, bad_eps / 64), InputError);
}

TEST_CASE("sdie converges to the ace reference at first order") {
  CHECK(check_sdie_to_ace(13, 3, 8).pass);
}

TEST_CASE("stability bounds") {
  CHECK(check_sdie_stability(15, 20, 6, 10).pass);
  CHECK(check_ace_stability(16, 4, 6, 10).pass);
}

TEST_CASE("continuum-limit properties") {
  CHECK(check_beta_characterization(17, 5, 6, 10).pass);
  CHECK(check_gl_decrease(18, 4, 6, 10).pass);
  CHECK(check_holder_bound(19, 4, 6, 10).pass);
  CHECK(check_htau_identity(20, 20, 6, 10).pass);
  CHECK(check_nth_term(21, 20, 6, 10).pass);
}

TEST_CASE("full battery passes and reports margins") {
  VerifyConfig cfg;
  cfg.seed = 1;
  cfg.trials = 10;
  const PropertyReport report = verify_theorems(cfg);
  CHECK(report.all_pass());
  CHECK(report.entries.size() >= 15);
  for (const auto& e : report.entries) {
    INFO(e.property);
    CHECK(e.pass);
    CHECK(std::isfinite(e.worst_margin));
  }
}

TEST_SUITE_END();
