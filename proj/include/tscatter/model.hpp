#pragma once

// Ingredients of the elliptical t model: the rho/u pair, the adjusted
// pure-scatter objective, weighted discrete laws, and the correspondence
// between location-scatter in R^d and pure scatter in R^{d+1}.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "tscatter/symmat.hpp"

namespace tscatter {

/// How the fixed-point iteration is started.
enum class InitMode { kIdentity, kCovariance };

struct SolverOptions {
  double tol_step = 1e-12;  // relative Frobenius change between iterates
  double tol_fp = 1e-9;     // fixed-point residual, relative to ||B||_F
  std::size_t max_iter = 1000;
  bool check_domain = true;
  InitMode init = InitMode::kIdentity;
};

/// Degrees of freedom and dimension of a t model; a0 = nu + dim.
class TConfig {
 public:
  /// Throws ConfigError unless nu > 0 (finite) and dim >= 1.
  TConfig(double nu, std::size_t dim, SolverOptions solver = {});

  double nu() const { return nu_; }
  std::size_t dim() const { return dim_; }
  double a0() const { return nu_ + static_cast<double>(dim_); }
  const SolverOptions& solver() const { return solver_; }
  SolverOptions& solver() { return solver_; }

  /// Model used for the pure-scatter lift: (nu - 1, dim + 1), same a0.
  TConfig lifted() const;

 private:
  double nu_;
  std::size_t dim_;
  SolverOptions solver_;
};

/// A finite weighted law on R^d.
class Sample {
 public:
  Sample() = default;
  /// Throws DimensionError on ragged/empty points, DomainError on
  /// non-finite coordinates, negative weights, or weights not summing to
  /// one within 1e-12.
  Sample(std::vector<Vector> points, Vector weights);
  static Sample uniform(std::vector<Vector> points);

  std::size_t size() const { return points_.size(); }
  std::size_t dim() const { return points_.empty() ? 0 : points_.front().size(); }
  const std::vector<Vector>& points() const { return points_; }
  const Vector& weights() const { return weights_; }
  const Vector& point(std::size_t i) const { return points_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }

  bool operator==(const Sample&) const = default;

 private:
  std::vector<Vector> points_;
  Vector weights_;
};

/// Merges exactly-equal points in first-occurrence order and drops
/// zero-weight atoms. When every input weight is identical the merged
/// weights are count / n, so replicating each point m times merges to a
/// bit-identical law.
Sample merge_duplicates(const Sample& s);

/// (1 - t) P + t P2; atoms with zero resulting weight are dropped.
Sample mixture(const Sample& p, const Sample& p2, double t);

double rho(double s, const TConfig& cfg);
double u_weight(double s, const TConfig& cfg);

/// 1/2 log det A + sum_i w_i [rho(y_i' A^{-1} y_i) - rho(y_i' y_i)].
double objective(const Sample& q, const PosDefMatrix& a, const TConfig& cfg);

struct Embedding {
  Vector mu;
  PosDefMatrix sigma;
  double gamma;
  PosDefMatrix a;
};

/// A = gamma [[Sigma + mu mu', mu], [mu', 1]].
Embedding embed(std::span<const double> mu, const PosDefMatrix& sigma, double gamma);

/// Inverse of embed. Throws NotPositiveDefinite if the recovered Sigma
/// fails the pivot test.
Embedding unembed(const PosDefMatrix& a, std::size_t dim);

/// y -> (y', 1)'.
Sample lift_sample(const Sample& p);
Vector lift_point(std::span<const double> y);

/// Both sides of (y',1) A^{-1} (y',1)' = (1 + (y-mu)' Sigma^{-1} (y-mu)) / gamma.
std::pair<double, double> quadform_identity_check(std::span<const double> y,
                                                  const Embedding& emb);

}  // namespace tscatter
