#include "tscatter/calculus.hpp"

#include <algorithm>
#include <cmath>

#include "tscatter/errors.hpp"

namespace tscatter {
namespace {

SymMatrix unflatten_pairs(std::span<const double> v, std::size_t d) {
  SymMatrix m(d);
  std::size_t k = 0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) m.set(i, j, v[k++]);
  return m;
}

void accumulate_gradient(std::span<const double> y, double w, const PosDefMatrix& a,
                         const TConfig& cfg, Vector& out) {
  const std::size_t d = a.dim();
  const double scale = cfg.a0() / (cfg.nu() + a.quad_form(y));
  std::size_t k = 0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j, ++k) {
      const double g = -a(i, j) + scale * y[i] * y[j];
      out[k] += w * (i == j ? 0.5 * g : g);
    }
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> pair_index(std::size_t d) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(pair_count(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) out.emplace_back(i, j);
  return out;
}

Vector gradient(const Sample& q, const PosDefMatrix& a, const TConfig& cfg) {
  if (q.dim() != a.dim() || cfg.dim() != a.dim()) throw DimensionError("gradient: dimension mismatch");
  Vector out(pair_count(a.dim()), 0.0);
  for (std::size_t i = 0; i < q.size(); ++i) accumulate_gradient(q.point(i), q.weight(i), a, cfg, out);
  return out;
}

Vector point_gradient(std::span<const double> y, const PosDefMatrix& a, const TConfig& cfg) {
  if (y.size() != a.dim() || cfg.dim() != a.dim())
    throw DimensionError("point_gradient: dimension mismatch");
  Vector out(pair_count(a.dim()), 0.0);
  accumulate_gradient(y, 1.0, a, cfg, out);
  return out;
}

SymMatrix hessian(const Sample& q, const PosDefMatrix& a, const TConfig& cfg) {
  const std::size_t d = a.dim();
  const SymMatrix c = a.inverse();
  const auto pairs = pair_index(d);
  const std::size_t p = pairs.size();
  Matrix h(p, p);
  for (std::size_t col = 0; col < p; ++col) {
    const auto [k, l] = pairs[col];
    const double step = 1e-5 / std::sqrt(a(k, k) * a(l, l));
    SymMatrix cp = c;
    SymMatrix cm = c;
    cp.set(k, l, c(k, l) + step);
    cm.set(k, l, c(k, l) - step);
    const PosDefMatrix ap(PosDefMatrix(std::move(cp)).inverse());
    const PosDefMatrix am(PosDefMatrix(std::move(cm)).inverse());
    const Vector gp = gradient(q, ap, cfg);
    const Vector gm = gradient(q, am, cfg);
    for (std::size_t row = 0; row < p; ++row) h(row, col) = (gp[row] - gm[row]) / (2.0 * step);
  }
  SymMatrix out(p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < p; ++j) out.set(i, j, 0.5 * (h(i, j) + h(j, i)));
  return out;
}

Vector flatten(std::span<const double> mu, const SymMatrix& sigma) {
  Vector out(mu.begin(), mu.end());
  for (std::size_t i = 0; i < sigma.dim(); ++i)
    for (std::size_t j = i; j < sigma.dim(); ++j) out.push_back(sigma(i, j));
  return out;
}

// --------------------------------------------------------------- influence

InfluenceContext::InfluenceContext(const Sample& p, const TConfig& cfg)
    : p_(p),
      cfg_(cfg),
      fit_(fit_lifted(p, cfg)),
      hessian_(hessian(fit_.lifted, fit_.scatter.b, fit_.lifted_cfg)),
      mean_gradient_(gradient(fit_.lifted, fit_.scatter.b, fit_.lifted_cfg)) {}

InfluenceResult InfluenceContext::implicit(std::span<const double> x) const {
  const std::size_t d = cfg_.dim();
  if (x.size() != d) throw DimensionError("influence: point has wrong dimension");
  const PosDefMatrix& a = fit_.scatter.b;
  Vector rhs = point_gradient(lift_point(x), a, fit_.lifted_cfg);
  for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] = mean_gradient_[k] - rhs[k];
  const SymMatrix dc = unflatten_pairs(hessian_.solve(rhs), d + 1);

  // dA = -A dC A
  const Matrix am = a.matrix().to_matrix();
  const Matrix da_full = am * dc.to_matrix() * am;
  const SymMatrix da = -1.0 * SymMatrix::from_matrix(da_full, 1e-9);

  // Differential of (A -> mu, Sigma, gamma) from the block formulas.
  const double gamma = a(d, d);
  const double dgamma = da(d, d);
  InfluenceResult out;
  out.method = InfluenceMethod::kImplicit;
  out.d_mu.resize(d);
  Vector mu(d);
  for (std::size_t i = 0; i < d; ++i) {
    mu[i] = a(i, d) / gamma;
    out.d_mu[i] = da(i, d) / gamma - a(i, d) * dgamma / (gamma * gamma);
  }
  out.d_sigma = SymMatrix(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j)
      out.d_sigma.set(i, j,
                      da(i, j) / gamma - a(i, j) * dgamma / (gamma * gamma) -
                          out.d_mu[i] * mu[j] - mu[i] * out.d_mu[j]);
  return out;
}

InfluenceResult InfluenceContext::finite_difference(std::span<const double> x) const {
  const std::size_t d = cfg_.dim();
  if (x.size() != d) throw DimensionError("influence: point has wrong dimension");
  const Sample point = Sample({Vector(x.begin(), x.end())}, {1.0});
  const Vector base = flatten(fit_.estimate.mu, fit_.estimate.sigma);

  auto quotient = [&](double t) {
    const LiftedFit f = fit_lifted(mixture(p_, point, t), cfg_, fit_.scatter.b);
    Vector q = flatten(f.estimate.mu, f.estimate.sigma);
    for (std::size_t k = 0; k < q.size(); ++k) q[k] = (q[k] - base[k]) / t;
    return q;
  };
  const Vector coarse = quotient(1e-3);
  const Vector fine = quotient(1e-4);
  Vector extrapolated(coarse.size());
  for (std::size_t k = 0; k < coarse.size(); ++k)
    extrapolated[k] = (10.0 * fine[k] - coarse[k]) / 9.0;

  InfluenceResult out;
  out.method = InfluenceMethod::kFiniteDifference;
  out.d_mu.assign(extrapolated.begin(), extrapolated.begin() + static_cast<std::ptrdiff_t>(d));
  out.d_sigma = unflatten_pairs(std::span<const double>(extrapolated).subspan(d), d);
  return out;
}

InfluenceComparison influence(const Sample& p, const TConfig& cfg, std::span<const double> x) {
  const InfluenceContext ctx(p, cfg);
  InfluenceComparison out{ctx.implicit(x), ctx.finite_difference(x), 0.0};
  const Vector a = out.implicit.flat();
  const Vector b = out.finite_difference.flat();
  Vector diff(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) diff[k] = b[k] - a[k];
  out.relative_discrepancy = norm2(diff) / norm2(a);
  return out;
}

// ------------------------------------------------------------ path check

PathTable gateaux_path_check(const Sample& p, const Sample& p2, const TConfig& cfg,
                             std::span<const double> t_list) {
  PathTable table;
  for (double t : t_list) {
    const LocationScatterEstimate est = fit_location_scatter(mixture(p, p2, t), cfg);
    table.rows.push_back(PathPoint{t, est.mu, est.sigma});
  }
  std::vector<const PathPoint*> sorted;
  for (const PathPoint& r : table.rows) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(),
            [](const PathPoint* a, const PathPoint* b) { return a->t < b->t; });
  for (std::size_t k = 0; k + 2 < sorted.size(); ++k) {
    const double t0 = sorted[k]->t, t1 = sorted[k + 1]->t, t2 = sorted[k + 2]->t;
    if (!(t0 < t1 && t1 < t2)) continue;
    const Vector f0 = flatten(sorted[k]->mu, sorted[k]->sigma);
    const Vector f1 = flatten(sorted[k + 1]->mu, sorted[k + 1]->sigma);
    const Vector f2 = flatten(sorted[k + 2]->mu, sorted[k + 2]->sigma);
    for (std::size_t c = 0; c < f0.size(); ++c) {
      const double d01 = (f1[c] - f0[c]) / (t1 - t0);
      const double d12 = (f2[c] - f1[c]) / (t2 - t1);
      table.max_second_difference =
          std::max(table.max_second_difference, std::abs((d12 - d01) / (t2 - t0)));
    }
  }
  return table;
}

}  // namespace tscatter
