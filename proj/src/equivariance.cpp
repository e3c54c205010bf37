#include "tscatter/equivariance.hpp"

#include <algorithm>
#include <cmath>

#include "tscatter/errors.hpp"

namespace tscatter {

Vector AffineMap::apply(std::span<const double> x) const {
  Vector y = a * x;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += v[i];
  return y;
}

double AffineMap::determinant() const {
  if (a.rows() != a.cols()) throw DimensionError("determinant: matrix is not square");
  Matrix lu = a;
  const std::size_t n = lu.rows();
  double det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu(i, k)) > std::abs(lu(piv, k))) piv = i;
    if (lu(piv, k) == 0.0) return 0.0;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
      det = -det;
    }
    det *= lu(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = lu(i, k) / lu(k, k);
      for (std::size_t j = k; j < n; ++j) lu(i, j) -= f * lu(k, j);
    }
  }
  return det;
}

bool AffineMap::singular() const {
  double scale = 1.0;
  for (std::size_t i = 0; i < a.rows(); ++i) scale *= norm2(a.row(i));
  return std::abs(determinant()) < 1e-12 * scale || scale == 0.0;
}

Sample affine_push(const Sample& p, const AffineMap& f) {
  if (f.a.cols() != p.dim() || f.v.size() != f.a.rows())
    throw DimensionError("affine_push: map and sample dimensions differ");
  std::vector<Vector> points;
  Vector weights;
  for (std::size_t i = 0; i < p.size(); ++i) {
    Vector y = f.apply(p.point(i));
    bool merged = false;
    for (std::size_t k = 0; k < points.size() && !merged; ++k) {
      double s = 0.0;
      for (std::size_t c = 0; c < y.size(); ++c) s += (points[k][c] - y[c]) * (points[k][c] - y[c]);
      if (std::sqrt(s) < 1e-12) {
        weights[k] += p.weight(i);
        merged = true;
      }
    }
    if (!merged) {
      points.push_back(std::move(y));
      weights.push_back(p.weight(i));
    }
  }
  return Sample(std::move(points), std::move(weights));
}

MeanCov sample_mean_cov(const Sample& x) {
  const std::size_t d = x.dim();
  MeanCov out{Vector(d, 0.0), SymMatrix(d)};
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t k = 0; k < d; ++k) out.mean[k] += x.weight(i) * x.point(i)[k];
  Vector c(d);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t k = 0; k < d; ++k) c[k] = x.point(i)[k] - out.mean[k];
    out.cov.add_outer(c, x.weight(i));
  }
  return out;
}

LocationScatterEstimate fit_functional(const Sample& p, const TConfig& cfg) {
  return p.dim() == 1 ? fit_univariate(p, cfg) : fit_location_scatter(p, cfg);
}

EquivarianceDefect check_equivariance(const Sample& p, const TConfig& cfg, const AffineMap& f) {
  if (f.singular()) throw DomainError("check_equivariance: map must be nonsingular");
  const LocationScatterEstimate before = fit_functional(p, cfg);
  const LocationScatterEstimate after = fit_functional(affine_push(p, f), cfg);
  const Vector mu_expected = f.apply(before.mu);
  const SymMatrix sigma_expected = congruence(f.a, before.sigma);

  EquivarianceDefect out;
  Vector dm(mu_expected.size());
  for (std::size_t k = 0; k < dm.size(); ++k) dm[k] = after.mu[k] - mu_expected[k];
  out.mu_defect = norm2(dm);
  out.sigma_defect = (after.sigma - sigma_expected).frobenius_norm();
  const double sigma_scale = sigma_expected.frobenius_norm();
  const double mu_scale = norm2(mu_expected) + std::sqrt(sigma_scale);
  out.mu_relative = mu_scale > 0.0 ? out.mu_defect / mu_scale : out.mu_defect;
  out.sigma_relative = sigma_scale > 0.0 ? out.sigma_defect / sigma_scale : out.sigma_defect;
  return out;
}

double covariance_singular_equivariance_check(const Sample& x, const Matrix& b) {
  const AffineMap f{b, Vector(b.rows(), 0.0)};
  const SymMatrix lhs = sample_mean_cov(affine_push(x, f)).cov;
  const SymMatrix rhs = congruence(b, sample_mean_cov(x).cov);
  return (lhs - rhs).frobenius_norm();
}

double mean_singular_equivariance_check(const Sample& x, const AffineMap& f) {
  const Vector lhs = sample_mean_cov(affine_push(x, f)).mean;
  const Vector rhs = f.apply(sample_mean_cov(x).mean);
  Vector diff(lhs.size());
  for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = lhs[k] - rhs[k];
  return norm2(diff);
}

Sample replicate(const Sample& p, std::size_t m) {
  if (m == 0) throw DomainError("replicate: m must be positive");
  std::vector<Vector> points;
  Vector weights;
  const bool uniform = std::all_of(p.weights().begin(), p.weights().end(),
                                   [&](double w) { return w == p.weights().front(); });
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t i = 0; i < p.size(); ++i) {
      points.push_back(p.point(i));
      weights.push_back(p.weight(i) / static_cast<double>(m));
    }
  if (uniform) return Sample::uniform(std::move(points));
  return Sample(std::move(points), std::move(weights));
}

}  // namespace tscatter
