#pragma once

// Derivatives of the adjusted t objective in the precision parameters
// C = A^{-1}, indexed by the pairs (i, j), i <= j, in row-major order, and
// influence functions of the location-scatter functional.

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "tscatter/model.hpp"
#include "tscatter/solver.hpp"

namespace tscatter {

/// Number of free entries of a symmetric d x d matrix.
constexpr std::size_t pair_count(std::size_t d) { return d * (d + 1) / 2; }

/// (i, j) pairs with i <= j in the order used by gradient/hessian.
std::vector<std::pair<std::size_t, std::size_t>> pair_index(std::size_t d);

/// d(objective)/dC_ij, averaged over Q. Entry (i, j) is
///   sum_k w_k [ -A_ij + (nu + d) y_i y_j / (nu + y'Cy) ] / (1 + delta_ij).
Vector gradient(const Sample& q, const PosDefMatrix& a, const TConfig& cfg);

/// The same quantity for a single point y.
Vector point_gradient(std::span<const double> y, const PosDefMatrix& a, const TConfig& cfg);

/// Central differences of the analytic gradient along each C_kl, step
/// 1e-5 / sqrt(A_kk A_ll), symmetrized. The step is a fixed fraction of C
/// in its own metric, so badly scaled or ill-conditioned A stay accurate.
SymMatrix hessian(const Sample& q, const PosDefMatrix& a, const TConfig& cfg);

/// (mu, vech(Sigma)) stacked: mu first, then Sigma_ij for i <= j.
Vector flatten(std::span<const double> mu, const SymMatrix& sigma);

enum class InfluenceMethod { kImplicit, kFiniteDifference };

struct InfluenceResult {
  Vector d_mu;
  SymMatrix d_sigma;
  InfluenceMethod method = InfluenceMethod::kImplicit;

  Vector flat() const { return flatten(d_mu, d_sigma); }
};

struct InfluenceComparison {
  InfluenceResult implicit;
  InfluenceResult finite_difference;
  double relative_discrepancy = 0.0;  // ||fd - implicit|| / ||implicit||
};

/// Fit, lifted Hessian, and its factorization for repeated influence
/// evaluations on one law.
class InfluenceContext {
 public:
  InfluenceContext(const Sample& p, const TConfig& cfg);

  const LiftedFit& fit() const { return fit_; }
  const SymMatrix& lifted_hessian() const { return hessian_.matrix(); }

  /// -H^{-1} (g(x) - Q g) mapped through the differential of unembed.
  InfluenceResult implicit(std::span<const double> x) const;
  /// Richardson-extrapolated difference quotients at t = 1e-3, 1e-4.
  InfluenceResult finite_difference(std::span<const double> x) const;

 private:
  Sample p_;
  TConfig cfg_;
  LiftedFit fit_;
  PosDefMatrix hessian_;
  Vector mean_gradient_;
};

InfluenceComparison influence(const Sample& p, const TConfig& cfg, std::span<const double> x);

struct PathPoint {
  double t = 0.0;
  Vector mu;
  SymMatrix sigma;
};

struct PathTable {
  std::vector<PathPoint> rows;
  /// Largest |second divided difference| over consecutive t triples of
  /// the flattened functional (0 with fewer than three rows).
  double max_second_difference = 0.0;
};

/// T((1 - t) P + t P2) for each t, in the order given.
PathTable gateaux_path_check(const Sample& p, const Sample& p2, const TConfig& cfg,
                             std::span<const double> t_list);

}  // namespace tscatter
