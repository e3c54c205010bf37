#include "tscatter/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tscatter/errors.hpp"

namespace tscatter {

TConfig::TConfig(double nu, std::size_t dim, SolverOptions solver)
    : nu_(nu), dim_(dim), solver_(solver) {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw ConfigError("nu must be positive and finite");
  if (dim == 0) throw ConfigError("dimension must be at least 1");
  if (!(solver.tol_step > 0.0) || !(solver.tol_fp > 0.0) || solver.max_iter == 0)
    throw ConfigError("solver tolerances must be positive");
}

TConfig TConfig::lifted() const {
  if (!(nu_ > 1.0)) throw ConfigError("location-scatter requires nu > 1");
  return TConfig(nu_ - 1.0, dim_ + 1, solver_);
}

// ---------------------------------------------------------------- Sample

Sample::Sample(std::vector<Vector> points, Vector weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.empty()) throw DimensionError("Sample: no points");
  if (points_.size() != weights_.size())
    throw DimensionError("Sample: points and weights differ in length");
  const std::size_t d = points_.front().size();
  if (d == 0) throw DimensionError("Sample: zero-dimensional points");
  double total = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i].size() != d) throw DimensionError("Sample: ragged points");
    for (double c : points_[i])
      if (!std::isfinite(c)) throw DomainError("Sample: non-finite coordinate");
    if (!(weights_[i] >= 0.0) || !std::isfinite(weights_[i]))
      throw DomainError("Sample: weights must be finite and nonnegative");
    total += weights_[i];
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("Sample: weights must sum to 1");
}

Sample Sample::uniform(std::vector<Vector> points) {
  const double w = 1.0 / static_cast<double>(points.size());
  Vector weights(points.size(), w);
  return Sample(std::move(points), std::move(weights));
}

Sample merge_duplicates(const Sample& s) {
  const bool uniform =
      std::all_of(s.weights().begin(), s.weights().end(),
                  [&](double w) { return w == s.weights().front(); });
  std::map<Vector, std::size_t> index;
  std::vector<Vector> points;
  Vector weights;
  std::vector<std::size_t> counts;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.weight(i) == 0.0) continue;
    auto [it, inserted] = index.try_emplace(s.point(i), points.size());
    if (inserted) {
      points.push_back(s.point(i));
      weights.push_back(s.weight(i));
      counts.push_back(1);
    } else {
      weights[it->second] += s.weight(i);
      ++counts[it->second];
    }
  }
  if (uniform) {
    const double n = static_cast<double>(s.size());
    for (std::size_t k = 0; k < points.size(); ++k)
      weights[k] = static_cast<double>(counts[k]) / n;
  }
  return Sample(std::move(points), std::move(weights));
}

Sample mixture(const Sample& p, const Sample& p2, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("mixture: t must lie in [0, 1]");
  if (p.dim() != p2.dim()) throw DimensionError("mixture: dimension mismatch");
  std::vector<Vector> points;
  Vector weights;
  auto append = [&](const Sample& s, double scale) {
    if (scale == 0.0) return;
    for (std::size_t i = 0; i < s.size(); ++i) {
      points.push_back(s.point(i));
      weights.push_back(scale * s.weight(i));
    }
  };
  append(p, 1.0 - t);
  append(p2, t);
  return Sample(std::move(points), std::move(weights));
}

// ------------------------------------------------------------- rho and u

double rho(double s, const TConfig& cfg) {
  if (!(s >= 0.0)) throw DomainError("rho: argument must be nonnegative");
  const double nu = cfg.nu();
  return 0.5 * cfg.a0() * std::log1p(s / nu);
}

double u_weight(double s, const TConfig& cfg) {
  if (!(s >= 0.0)) throw DomainError("u_weight: argument must be nonnegative");
  return cfg.a0() / (cfg.nu() + s);
}

double objective(const Sample& q, const PosDefMatrix& a, const TConfig& cfg) {
  if (q.dim() != a.dim() || cfg.dim() != a.dim())
    throw DimensionError("objective: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const Vector& y = q.point(i);
    acc += q.weight(i) * (rho(a.quad_form(y), cfg) - rho(dot(y, y), cfg));
  }
  return 0.5 * a.log_det() + acc;
}

// ------------------------------------------------------------- embedding

Embedding embed(std::span<const double> mu, const PosDefMatrix& sigma, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("embed: gamma must be positive");
  const std::size_t d = sigma.dim();
  if (mu.size() != d) throw DimensionError("embed: mu and sigma differ in dimension");
  SymMatrix a(d + 1);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) a.set(i, j, gamma * (sigma(i, j) + mu[i] * mu[j]));
    a.set(i, d, gamma * mu[i]);
  }
  a.set(d, d, gamma);
  return Embedding{Vector(mu.begin(), mu.end()), sigma, gamma, PosDefMatrix(std::move(a))};
}

Embedding unembed(const PosDefMatrix& a, std::size_t dim) {
  if (a.dim() != dim + 1) throw DimensionError("unembed: A must have size d + 1");
  const double gamma = a(dim, dim);
  Vector mu(dim);
  for (std::size_t i = 0; i < dim; ++i) mu[i] = a(i, dim) / gamma;
  SymMatrix sigma(dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = i; j < dim; ++j) sigma.set(i, j, a(i, j) / gamma - mu[i] * mu[j]);
  return Embedding{std::move(mu), PosDefMatrix(std::move(sigma)), gamma, a};
}

Vector lift_point(std::span<const double> y) {
  Vector z(y.begin(), y.end());
  z.push_back(1.0);
  return z;
}

Sample lift_sample(const Sample& p) {
  std::vector<Vector> points;
  points.reserve(p.size());
  for (const Vector& y : p.points()) points.push_back(lift_point(y));
  return Sample(std::move(points), p.weights());
}

std::pair<double, double> quadform_identity_check(std::span<const double> y,
                                                  const Embedding& emb) {
  const Vector z = lift_point(y);
  const double lhs = emb.a.quad_form(z);
  Vector r(y.begin(), y.end());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= emb.mu[i];
  const double rhs = (1.0 + emb.sigma.quad_form(r)) / emb.gamma;
  return {lhs, rhs};
}

}  // namespace tscatter
