#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "tscatter/errors.hpp"
#include "tscatter/model.hpp"

using namespace tscatter;

namespace {

Sample four_point() {
  return Sample::uniform({{1, 0}, {-1, 0}, {0, 1}, {0, -1}});
}

}  // namespace

TEST(TConfig, Validation) {
  EXPECT_THROW(TConfig(0.0, 2), ConfigError);
  EXPECT_THROW(TConfig(-1.0, 2), ConfigError);
  EXPECT_THROW(TConfig(INFINITY, 2), ConfigError);
  EXPECT_THROW(TConfig(2.0, 0), ConfigError);
  EXPECT_DOUBLE_EQ(TConfig(2.5, 3).a0(), 5.5);
  const TConfig lifted = TConfig(3.0, 2).lifted();
  EXPECT_DOUBLE_EQ(lifted.nu(), 2.0);
  EXPECT_EQ(lifted.dim(), 3u);
  EXPECT_DOUBLE_EQ(lifted.a0(), 5.0);
  EXPECT_THROW(TConfig(1.0, 2).lifted(), ConfigError);
}

TEST(Sample, Validation) {
  EXPECT_THROW(Sample({{1, 2}, {3}}, {0.5, 0.5}), DimensionError);
  EXPECT_THROW(Sample({{1, 2}}, {0.9}), DomainError);
  EXPECT_THROW(Sample({{1, 2}, {0, 0}}, {1.5, -0.5}), DomainError);
  EXPECT_THROW(Sample({{NAN, 2}}, {1.0}), DomainError);
  EXPECT_THROW(Sample::uniform({}), DimensionError);
}

TEST(Rho, Examples) {
  const TConfig cfg(2.0, 2);
  EXPECT_EQ(rho(0.0, cfg), 0.0);
  EXPECT_NEAR(rho(2.0, cfg), 2.0 * std::log(2.0), 1e-15);
  EXPECT_EQ(u_weight(0.0, cfg), 2.0);
  EXPECT_DOUBLE_EQ(u_weight(2.0, cfg), 1.0);
  EXPECT_THROW(rho(-1.0, cfg), DomainError);
  EXPECT_THROW(u_weight(-1.0, cfg), DomainError);
}

TEST(Rho, UIsDerivativeOfTwoRho) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(0.0, 50.0);
  for (double nu : {0.5, 1.0, 3.0, 30.0}) {
    const TConfig cfg(nu, 3);
    for (int i = 0; i < 20; ++i) {
      const double s = unif(rng);
      const double h = 1e-5 * (1 + s);
      const double fd = 2.0 * (rho(s + h, cfg) - rho(s - h, cfg)) / (2 * h);
      EXPECT_NEAR(u_weight(s, cfg), fd, 1e-7 * u_weight(s, cfg));
      // s u(s) increases to a0 = nu + d.
      EXPECT_LT(s * u_weight(s, cfg), cfg.a0());
    }
    EXPECT_NEAR(1e12 * u_weight(1e12, cfg), cfg.a0(), 1e-9 * cfg.a0());
  }
}

TEST(Objective, FourPointExample) {
  const TConfig cfg(2.0, 2);
  const Sample q = four_point();
  EXPECT_EQ(objective(q, PosDefMatrix(SymMatrix::identity(2)), cfg), 0.0);
  const Vector half{0.5, 0.5};
  const double at_half = objective(q, PosDefMatrix(SymMatrix::diagonal(half)), cfg);
  // Oracle: 1/2 log(1/4) + 2 [log(1 + 2/2) - log(1 + 1/2)].
  EXPECT_NEAR(at_half, 0.5 * std::log(0.25) + 2.0 * (std::log(2.0) - std::log(1.5)), 1e-14);
  EXPECT_LT(at_half, 0.0);
}

TEST(Embedding, RoundTripOnRandomInputs) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> gamma_dist(0.2, 5.0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t d = 1 + trial % 4;
    const SymMatrix sigma = fixtures::random_pd(rng, d);
    Vector mu(d);
    for (double& m : mu) m = 3 * normal(rng);
    const double gamma = gamma_dist(rng);
    const Embedding e = embed(mu, PosDefMatrix(sigma), gamma);
    EXPECT_DOUBLE_EQ(e.a.matrix()(d, d), gamma);
    const Embedding back = unembed(e.a, d);
    EXPECT_NEAR(back.gamma, gamma, 1e-14 * gamma);
    for (std::size_t k = 0; k < d; ++k) EXPECT_NEAR(back.mu[k], mu[k], 1e-10 * (1 + std::abs(mu[k])));
    EXPECT_LT(fixtures::max_abs_diff(back.sigma.matrix(), sigma), 1e-9 * (1 + sigma.max_abs()));

    // Quadratic-form identity checked against a direct inverse.
    const Vector y = fixtures::gaussian_points(rng, 1, d).front();
    const auto [lhs, rhs] = quadform_identity_check(y, e);
    const Matrix ainv = e.a.inverse().to_matrix();
    const Vector z = lift_point(y);
    const double direct = dot(z, ainv * z);
    EXPECT_NEAR(lhs, direct, 1e-9 * direct);
    EXPECT_NEAR(lhs, rhs, 1e-9 * rhs);
  }
}

TEST(Lift, AppendsOne) {
  const Sample lifted = lift_sample(four_point());
  EXPECT_EQ(lifted.dim(), 3u);
  for (const Vector& p : lifted.points()) EXPECT_EQ(p.back(), 1.0);
  EXPECT_EQ(lift_point(Vector{2, 3}), (Vector{2, 3, 1}));
}

TEST(MergeDuplicates, ReplicatedUniformIsBitIdentical) {
  std::mt19937_64 rng(9);
  const auto pts = fixtures::gaussian_points(rng, 7, 3);
  std::vector<Vector> rep;
  for (int m = 0; m < 5; ++m) rep.insert(rep.end(), pts.begin(), pts.end());
  EXPECT_EQ(merge_duplicates(Sample::uniform(rep)), merge_duplicates(Sample::uniform(pts)));
}

TEST(MergeDuplicates, SumsWeightsAndDropsZeros) {
  const Sample s({{0, 0}, {1, 1}, {0, 0}, {2, 2}}, {0.25, 0.5, 0.25, 0.0});
  const Sample m = merge_duplicates(s);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m.point(0), (Vector{0, 0}));
  EXPECT_DOUBLE_EQ(m.weight(0), 0.5);
}

TEST(Mixture, EndpointsAndWeights) {
  const Sample p = four_point();
  const Sample x({{5, 5}}, {1.0});
  EXPECT_EQ(mixture(p, x, 0.0).size(), 4u);
  const Sample m = mixture(p, x, 0.2);
  ASSERT_EQ(m.size(), 5u);
  EXPECT_DOUBLE_EQ(m.weight(4), 0.2);
  EXPECT_DOUBLE_EQ(m.weight(0), 0.2);
  EXPECT_THROW(mixture(p, x, 1.5), DomainError);
}
