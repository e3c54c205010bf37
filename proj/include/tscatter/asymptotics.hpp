#pragma once

// Monte-Carlo checks of the sqrt(n) normal limit of the t functionals,
// the influence-function sandwich covariance, and a uniform LLN diagnostic
// over a neighbourhood of the fitted parameter.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "tscatter/model.hpp"

namespace tscatter {

struct TailCheck {
  double radius = 0.0;
  double delta = 0.5;
};

struct McOptions {
  std::size_t workers = 0;  // 0: worker_count()
  std::optional<TailCheck> tail;
};

struct McReport {
  std::size_t n = 0;
  std::size_t replicates = 0;  // R
  std::size_t parameters = 0;  // d + d(d+1)/2
  Vector population;           // flattened T(P)
  std::vector<Vector> scaled_errors;  // sqrt(n) (T(P_n) - T(P)) for kept replicates
  Vector mean;
  // Empty when fewer than two replicates were kept.
  SymMatrix covariance;
  Vector skewness;
  Vector excess_kurtosis;
  double domain_hit_rate = 0.0;
  std::size_t domain_failures = 0;
  std::size_t solver_failures = 0;
  std::optional<bool> tail_condition;
};

/// Generator for replicate `index`, derived from (seed, index) only.
std::mt19937_64 replicate_rng(std::uint64_t seed, std::uint64_t index);

/// n i.i.d. draws from a finite law, merged into a weighted sample.
Sample draw_empirical(const Sample& p, std::size_t n, std::mt19937_64& rng);

McReport mc_normality(const Sample& p, const TConfig& cfg, std::size_t n, std::size_t replicates,
                      std::uint64_t seed, const McOptions& options = {});

/// sum_x P({x}) IF(x) IF(x)' over the atoms of P, flattened coordinates.
SymMatrix sandwich_covariance(const Sample& p, const TConfig& cfg);

/// h(y, (mu, Sigma)) = 1/2 log det Sigma + rho((y-mu)' Sigma^{-1} (y-mu)) - rho(y'y).
double location_scatter_loss(std::span<const double> y, std::span<const double> mu,
                             const PosDefMatrix& sigma, const TConfig& cfg);

struct GcRow {
  std::size_t n = 0;
  double sup_deviation = 0.0;
};

struct GcCenter {
  Vector mu;
  SymMatrix sigma;
};

/// For each n, sup over a parameter grid of |P_n h - P h|. The grid holds
/// the center plus grid_size - 1 points (mu + L a, L (I+S)(I+S)' L') with
/// ||(a, S)|| <= radius < 1, where Sigma = L L'. The center defaults to the
/// fitted T(P).
std::vector<GcRow> gc_diagnostic(const Sample& p, const TConfig& cfg, double radius,
                                 std::size_t grid_size, std::span<const std::size_t> n_list,
                                 std::uint64_t seed,
                                 const std::optional<GcCenter>& center = std::nullopt);

}  // namespace tscatter
