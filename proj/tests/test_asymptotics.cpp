#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "tscatter/asymptotics.hpp"
#include "tscatter/calculus.hpp"
#include "tscatter/counterexample.hpp"
#include "tscatter/equivariance.hpp"
#include "tscatter/errors.hpp"

using namespace tscatter;

TEST(ReplicateRng, DependsOnSeedAndIndexOnly) {
  auto a = replicate_rng(42, 7);
  auto b = replicate_rng(42, 7);
  auto c = replicate_rng(42, 8);
  auto e = replicate_rng(43, 7);
  const auto first = a();
  EXPECT_EQ(first, b());
  EXPECT_NE(first, c());
  EXPECT_NE(first, e());
}

TEST(DrawEmpirical, FrequenciesFollowWeights) {
  const Sample p({{0}, {1}, {2}}, {0.5, 0.3, 0.2});
  auto rng = replicate_rng(1, 0);
  const Sample s = draw_empirical(p, 20000, rng);
  double total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const std::size_t atom = static_cast<std::size_t>(s.point(i)[0]);
    EXPECT_NEAR(s.weight(i), p.weight(atom), 0.02);
    total += s.weight(i);
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_THROW(draw_empirical(p, 0, rng), DomainError);
}

TEST(McNormality, DeterministicAcrossWorkerCounts) {
  const TConfig cfg(3.0, 2);
  McOptions one;
  one.workers = 1;
  McOptions four;
  four.workers = 4;
  const McReport a = mc_normality(make_Pk(1), cfg, 60, 40, 17, one);
  const McReport b = mc_normality(make_Pk(1), cfg, 60, 40, 17, four);
  EXPECT_EQ(a.scaled_errors, b.scaled_errors);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.domain_failures, b.domain_failures);
  EXPECT_EQ(a.parameters, 5u);
  EXPECT_EQ(a.population.size(), 5u);
}

TEST(McNormality, SingleReplicate) {
  const McReport r = mc_normality(make_Pk(1), TConfig(3.0, 2), 50, 1, 3);
  EXPECT_EQ(r.replicates, 1u);
  EXPECT_LE(r.scaled_errors.size(), 1u);
  EXPECT_EQ(r.covariance.dim(), 0u);
  EXPECT_TRUE(r.skewness.empty());
}

TEST(McNormality, SmallSamplesCountDomainFailures) {
  // With n = 3 draws from P^(1), collinear samples are common.
  const McReport r = mc_normality(make_Pk(1), TConfig(3.0, 2), 3, 200, 5);
  EXPECT_GT(r.domain_failures, 0u);
  EXPECT_LT(r.domain_hit_rate, 1.0);
  EXPECT_EQ(r.scaled_errors.size() + r.domain_failures + r.solver_failures, 200u);
}

TEST(McNormality, SymmetricLawMeanNearZero) {
  const McReport r = mc_normality(make_Pk(1), TConfig(3.0, 2), 200, 200, 11);
  ASSERT_GT(r.scaled_errors.size(), 150u);
  const double kept = static_cast<double>(r.scaled_errors.size());
  for (std::size_t k = 0; k < 2; ++k) {
    const double se = std::sqrt(r.covariance(k, k) / kept);
    EXPECT_LT(std::abs(r.mean[k]), 3.5 * se);
  }
  EXPECT_NEAR(r.domain_hit_rate, 1.0, 1e-12);
}

TEST(McNormality, TailFlagReported) {
  McOptions opt;
  opt.tail = TailCheck{2.0, 0.5};
  const McReport r = mc_normality(make_Pk(1), TConfig(3.0, 2), 30, 2, 1, opt);
  ASSERT_TRUE(r.tail_condition.has_value());
  EXPECT_TRUE(*r.tail_condition);
}

TEST(Sandwich, SymmetryKillsCrossBlocks) {
  const SymMatrix s = sandwich_covariance(make_Pk(1), TConfig(3.0, 2));
  ASSERT_EQ(s.dim(), 5u);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 2; j < 5; ++j) EXPECT_NEAR(s(i, j), 0.0, 1e-8);
  EXPECT_GE(sym_eigenvalues(s).front(), -1e-10);
}

TEST(Sandwich, DiagonalScalingTransformsCovariance) {
  // Under x -> D x, mu scales by D and Sigma_ij by D_i D_j.
  std::mt19937_64 rng(41);
  const Sample p = fixtures::gaussian_sample(rng, 10, 2);
  const Vector scale{2.0, 0.5};
  Matrix a(2, 2);
  a(0, 0) = scale[0];
  a(1, 1) = scale[1];
  const TConfig cfg(3.0, 2);
  const SymMatrix base = sandwich_covariance(p, cfg);
  const SymMatrix moved = sandwich_covariance(affine_push(p, AffineMap{a, Vector{1, -1}}), cfg);
  const Vector factor{scale[0], scale[1], scale[0] * scale[0], scale[0] * scale[1], scale[1] * scale[1]};
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j)
      EXPECT_NEAR(moved(i, j), factor[i] * factor[j] * base(i, j), 1e-6 * (1 + base.max_abs()));
}

TEST(GcDiagnostic, PointMassHasZeroDeviation) {
  const Sample delta({{0, 0}}, {1.0});
  const std::size_t ns[] = {10, 100};
  const auto rows = gc_diagnostic(delta, TConfig(3.0, 2), 0.5, 20, ns, 1,
                                  GcCenter{Vector{0, 0}, SymMatrix::identity(2)});
  for (const GcRow& r : rows) EXPECT_EQ(r.sup_deviation, 0.0);
}

TEST(GcDiagnostic, SingletonGridIsPlainLln) {
  const TConfig cfg(3.0, 2);
  const Sample p = make_Pk(1);
  const std::size_t ns[] = {500};
  const auto rows = gc_diagnostic(p, cfg, 0.5, 1, ns, 9);
  auto rng = replicate_rng(9, 0);
  const Sample pn = draw_empirical(p, 500, rng);
  const LocationScatterEstimate est = fit_location_scatter(p, cfg);
  const PosDefMatrix sigma(est.sigma);
  double pn_h = 0.0, p_h = 0.0;
  for (std::size_t i = 0; i < pn.size(); ++i)
    pn_h += pn.weight(i) * location_scatter_loss(pn.point(i), est.mu, sigma, cfg);
  for (std::size_t i = 0; i < p.size(); ++i)
    p_h += p.weight(i) * location_scatter_loss(p.point(i), est.mu, sigma, cfg);
  EXPECT_NEAR(rows[0].sup_deviation, std::abs(pn_h - p_h), 1e-14);
}

TEST(GcDiagnostic, RejectsRadiusOutsideUnitBall) {
  const std::size_t ns[] = {10};
  EXPECT_THROW(gc_diagnostic(make_Pk(1), TConfig(3.0, 2), 1.0, 5, ns, 1), DomainError);
}

TEST(LocationScatterLoss, MatchesDefinition) {
  const TConfig cfg(3.0, 2);
  const Vector y{1.0, 2.0}, mu{0.5, 0.5};
  const Vector diag{2.0, 0.5};
  const double got = location_scatter_loss(y, mu, PosDefMatrix(SymMatrix::diagonal(diag)), cfg);
  // (y - mu)' Sigma^{-1} (y - mu) = 0.125 + 4.5; y'y = 5; log det = 0.
  const double expected = rho(4.625, cfg) - rho(5.0, cfg);
  EXPECT_NEAR(got, expected, 1e-14);
}
