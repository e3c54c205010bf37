#include "tscatter/solver.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "tscatter/calculus.hpp"
#include "tscatter/domain.hpp"
#include "tscatter/errors.hpp"

namespace tscatter {
namespace {

SymMatrix weighted_scatter(const Sample& q, const PosDefMatrix& b, const TConfig& cfg) {
  SymMatrix next(q.dim());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const Vector& y = q.point(i);
    next.add_outer(y, q.weight(i) * u_weight(b.quad_form(y), cfg));
  }
  return next;
}

PosDefMatrix initial_guess(const Sample& q, const TConfig& cfg) {
  const std::size_t d = q.dim();
  if (cfg.solver().init == InitMode::kIdentity) return PosDefMatrix(SymMatrix::identity(d));
  SymMatrix m(d);
  for (std::size_t i = 0; i < q.size(); ++i) m.add_outer(q.point(i), q.weight(i));
  const double ridge = 1e-8 * m.trace();
  for (std::size_t i = 0; i < d; ++i) m.set(i, i, m(i, i) + ridge);
  return PosDefMatrix(std::move(m));
}

}  // namespace

CriticalPointCheck verify_critical_point(const Sample& q, const PosDefMatrix& b,
                                         const TConfig& cfg) {
  if (q.dim() != b.dim()) throw DimensionError("verify_critical_point: dimension mismatch");
  CriticalPointCheck out;
  out.fixed_point_residual = (b.matrix() - weighted_scatter(q, b, cfg)).frobenius_norm();
  out.gradient_norm = norm2(gradient(q, b, cfg));
  return out;
}

ScatterFit fit_scatter(const Sample& q, const TConfig& cfg,
                       const std::optional<PosDefMatrix>& init) {
  if (q.dim() != cfg.dim()) throw DimensionError("fit_scatter: sample and config dimensions differ");
  const SolverOptions& opt = cfg.solver();
  if (opt.check_domain) {
    const DomainReport report = in_U(q, cfg);
    if (!report.member) throw_violation(report);
  }
  const Sample merged = merge_duplicates(q);
  PosDefMatrix b = init ? *init : initial_guess(merged, cfg);
  if (b.dim() != cfg.dim()) throw DimensionError("fit_scatter: initial matrix has wrong size");

  SolveReport report;
  auto record = [&](const PosDefMatrix& m) {
    report.objective_trace.push_back(objective(merged, m, cfg));
    const Vector ev = sym_eigenvalues(m.matrix());
    report.min_eigenvalue_trace.push_back(ev.front());
    report.condition_number_trace.push_back(ev.back() / ev.front());
  };
  record(b);

  double change = std::numeric_limits<double>::infinity();
  while (report.iterations < opt.max_iter && !(change < opt.tol_step)) {
    SymMatrix next = weighted_scatter(merged, b, cfg);
    change = (next - b.matrix()).frobenius_norm() / b.matrix().frobenius_norm();
    ++report.iterations;
    try {
      b = PosDefMatrix(next);
    } catch (const NotPositiveDefinite&) {
      report.min_eigenvalue_trace.push_back(sym_eigenvalues(next).front());
      throw NoConvergence("fit_scatter: iterate lost positive definiteness (eigenvalue collapse)",
                          report.iterations, std::numeric_limits<double>::quiet_NaN(),
                          report.min_eigenvalue_trace);
    }
    record(b);
  }

  const CriticalPointCheck check = verify_critical_point(merged, b, cfg);
  report.fixed_point_residual = check.fixed_point_residual;
  report.gradient_norm = check.gradient_norm;
  const double scale = b.matrix().frobenius_norm();
  report.converged = change < opt.tol_step && check.fixed_point_residual < opt.tol_fp * scale &&
                     check.gradient_norm < opt.tol_fp * scale;
  if (!report.converged)
    throw NoConvergence("fit_scatter: no convergence after " +
                            std::to_string(report.iterations) + " iterations",
                        report.iterations, check.fixed_point_residual,
                        report.min_eigenvalue_trace);
  return ScatterFit{std::move(b), std::move(report)};
}

LiftedFit fit_lifted(const Sample& p, const TConfig& cfg, const std::optional<PosDefMatrix>& init) {
  if (p.dim() != cfg.dim()) throw DimensionError("fit_location_scatter: dimension mismatch");
  if (!(cfg.nu() > 1.0)) throw ConfigError("location-scatter requires nu > 1");
  if (cfg.solver().check_domain) {
    const DomainReport report = in_V(p, cfg);
    if (!report.member) throw_violation(report);
  }
  TConfig lifted_cfg = cfg.lifted();
  lifted_cfg.solver().check_domain = false;
  Sample merged = merge_duplicates(p);
  Sample lifted = lift_sample(merged);
  ScatterFit scatter = fit_scatter(lifted, lifted_cfg, init);

  const std::size_t d = cfg.dim();
  Embedding emb = unembed(scatter.b, d);
  LocationScatterEstimate est;
  est.mu = emb.mu;
  est.sigma = emb.sigma.matrix();
  est.gamma_check = emb.gamma;
  est.weight_sum = 0.0;
  Vector r(d);
  for (std::size_t i = 0; i < merged.size(); ++i) {
    for (std::size_t k = 0; k < d; ++k) r[k] = merged.point(i)[k] - emb.mu[k];
    est.weight_sum += merged.weight(i) * u_weight(emb.sigma.quad_form(r), cfg);
  }
  est.report = scatter.report;
  if (std::abs(est.gamma_check - 1.0) >= 1e-8 || std::abs(est.weight_sum - 1.0) >= 1e-8)
    throw NoConvergence("fit_location_scatter: lifted solution violates A(d+1,d+1) = 1",
                        scatter.report.iterations, scatter.report.fixed_point_residual,
                        scatter.report.min_eigenvalue_trace);
  return LiftedFit{std::move(lifted), lifted_cfg, std::move(scatter), std::move(est)};
}

LocationScatterEstimate fit_location_scatter(const Sample& p, const TConfig& cfg) {
  return fit_lifted(p, cfg).estimate;
}

LocationScatterEstimate fit_univariate(const Sample& p, const TConfig& cfg) {
  if (p.dim() != 1 || cfg.dim() != 1) throw DimensionError("fit_univariate: needs d = 1");
  if (!(cfg.nu() > 1.0)) throw ConfigError("location-scatter requires nu > 1");
  const SubspaceMass atom = max_subspace_mass(p, 0, /*affine=*/true);
  const double bound = cfg.nu() / (cfg.nu() + 1.0);
  if (atom.mass >= bound - kThresholdSlack) {
    LocationScatterEstimate est;
    est.mu = p.point(atom.witness.front());
    est.sigma = SymMatrix(1);
    est.degenerate = true;
    est.weight_sum = std::numeric_limits<double>::quiet_NaN();
    est.report.converged = true;
    return est;
  }
  TConfig checked = cfg;
  checked.solver().check_domain = false;
  return fit_location_scatter(p, checked);
}

bool multistart_uniqueness_probe(const Sample& q, const TConfig& cfg, std::size_t k,
                                 std::uint64_t seed) {
  if (k <= 1) return true;
  const std::size_t d = cfg.dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  TConfig unchecked = cfg;
  std::optional<PosDefMatrix> reference;
  for (std::size_t s = 0; s < k; ++s) {
    Matrix g(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) g(i, j) = normal(rng);
    SymMatrix start = congruence(g, SymMatrix::identity(d));
    for (std::size_t i = 0; i < d; ++i) start.set(i, i, start(i, i) + 0.1);
    ScatterFit fit = fit_scatter(q, unchecked, PosDefMatrix(std::move(start)));
    unchecked.solver().check_domain = false;
    if (!reference) {
      reference = fit.b;
    } else if ((fit.b.matrix() - reference->matrix()).frobenius_norm() >= 1e-6) {
      return false;
    }
  }
  return true;
}

}  // namespace tscatter
