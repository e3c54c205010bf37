#pragma once

#include <utility>

#include "tscatter/model.hpp"
#include "tscatter/solver.hpp"

namespace tscatter {

/// x -> A x + v; A may be singular.
struct AffineMap {
  Matrix a;
  Vector v;

  Vector apply(std::span<const double> x) const;
  double determinant() const;
  /// |det A| < 1e-12 times the product of the row norms of A.
  bool singular() const;
};

/// Image law of P under f; coincident images (within 1e-12) are merged.
Sample affine_push(const Sample& p, const AffineMap& f);

struct MeanCov {
  Vector mean;
  SymMatrix cov;  // sum_i w_i (x_i - mean)(x_i - mean)'
};

MeanCov sample_mean_cov(const Sample& x);

/// fit_univariate for d = 1, fit_location_scatter otherwise.
LocationScatterEstimate fit_functional(const Sample& p, const TConfig& cfg);

struct EquivarianceDefect {
  double mu_defect = 0.0;     // ||mu(fP) - (A mu(P) + v)||
  double sigma_defect = 0.0;  // ||Sigma(fP) - A Sigma(P) A'||_F
  double mu_relative = 0.0;     // mu_defect / (||A mu + v|| + sqrt||A Sigma A'||_F)
  double sigma_relative = 0.0;  // sigma_defect / ||A Sigma A'||_F
};

/// Throws DomainError if f is singular.
EquivarianceDefect check_equivariance(const Sample& p, const TConfig& cfg, const AffineMap& f);

/// ||cov(B X) - B cov(X) B'||_F for arbitrary (possibly singular) B.
double covariance_singular_equivariance_check(const Sample& x, const Matrix& b);

/// ||mean(B X + v) - (B mean(X) + v)||.
double mean_singular_equivariance_check(const Sample& x, const AffineMap& f);

/// Each atom repeated m times with weight w / m.
Sample replicate(const Sample& p, std::size_t m);

}  // namespace tscatter
