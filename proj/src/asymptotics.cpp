#include "tscatter/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tscatter/calculus.hpp"
#include "tscatter/domain.hpp"
#include "tscatter/errors.hpp"
#include "tscatter/parallel.hpp"
#include "tscatter/solver.hpp"

namespace tscatter {
namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Box-Muller; keeps draws identical across standard libraries.
double standard_normal(std::mt19937_64& rng) {
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

struct MomentSummary {
  Vector mean;
  SymMatrix covariance;
  Vector skewness;
  Vector excess_kurtosis;
};

MomentSummary summarize(const std::vector<Vector>& rows, std::size_t p) {
  MomentSummary s;
  const double r = static_cast<double>(rows.size());
  s.mean.assign(p, 0.0);
  for (const Vector& row : rows)
    for (std::size_t k = 0; k < p; ++k) s.mean[k] += row[k] / r;
  if (rows.size() < 2) return s;

  s.covariance = SymMatrix(p);
  Vector m2(p, 0.0), m3(p, 0.0), m4(p, 0.0);
  Vector centered(p);
  for (const Vector& row : rows) {
    for (std::size_t k = 0; k < p; ++k) {
      const double c = row[k] - s.mean[k];
      centered[k] = c;
      m2[k] += c * c / r;
      m3[k] += c * c * c / r;
      m4[k] += c * c * c * c / r;
    }
    s.covariance.add_outer(centered, 1.0 / (r - 1.0));
  }
  s.skewness.resize(p);
  s.excess_kurtosis.resize(p);
  for (std::size_t k = 0; k < p; ++k) {
    s.skewness[k] = m3[k] / std::pow(m2[k], 1.5);
    s.excess_kurtosis[k] = m4[k] / (m2[k] * m2[k]) - 3.0;
  }
  return s;
}

}  // namespace

std::mt19937_64 replicate_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

Sample draw_empirical(const Sample& p, std::size_t n, std::mt19937_64& rng) {
  if (n == 0) throw DomainError("draw_empirical: n must be positive");
  Vector cumulative(p.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) cumulative[i] = acc += p.weight(i);
  std::vector<Vector> points;
  points.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double u = uniform01(rng) * acc;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    std::size_t idx = static_cast<std::size_t>(it - cumulative.begin());
    idx = std::min(idx, p.size() - 1);
    while (p.weight(idx) == 0.0 && idx > 0) --idx;
    points.push_back(p.point(idx));
  }
  return merge_duplicates(Sample::uniform(std::move(points)));
}

McReport mc_normality(const Sample& p, const TConfig& cfg, std::size_t n, std::size_t replicates,
                      std::uint64_t seed, const McOptions& options) {
  if (n == 0 || replicates == 0) throw ConfigError("mc_normality: n and R must be positive");
  const std::size_t d = cfg.dim();
  McReport report;
  report.n = n;
  report.replicates = replicates;
  report.parameters = d + pair_count(d);
  const LocationScatterEstimate pop = fit_location_scatter(p, cfg);
  report.population = flatten(pop.mu, pop.sigma);
  if (options.tail) report.tail_condition = tail_condition(p, options.tail->radius, options.tail->delta, cfg);

  enum class Outcome { kOk, kDomain, kSolver };
  std::vector<Outcome> outcome(replicates, Outcome::kOk);
  std::vector<Vector> rows(replicates);
  const double root_n = std::sqrt(static_cast<double>(n));
  const std::size_t workers = options.workers ? options.workers : worker_count();
  parallel_for(replicates, workers, [&](std::size_t r) {
    std::mt19937_64 rng = replicate_rng(seed, r);
    const Sample pn = draw_empirical(p, n, rng);
    try {
      const LocationScatterEstimate est = fit_location_scatter(pn, cfg);
      Vector row = flatten(est.mu, est.sigma);
      for (std::size_t k = 0; k < row.size(); ++k)
        row[k] = root_n * (row[k] - report.population[k]);
      rows[r] = std::move(row);
    } catch (const DomainViolation&) {
      outcome[r] = Outcome::kDomain;
    } catch (const NoConvergence&) {
      outcome[r] = Outcome::kSolver;
    }
  });

  for (std::size_t r = 0; r < replicates; ++r) {
    switch (outcome[r]) {
      case Outcome::kOk: report.scaled_errors.push_back(std::move(rows[r])); break;
      case Outcome::kDomain: ++report.domain_failures; break;
      case Outcome::kSolver: ++report.solver_failures; break;
    }
  }
  report.domain_hit_rate =
      1.0 - static_cast<double>(report.domain_failures) / static_cast<double>(replicates);
  if (!report.scaled_errors.empty()) {
    MomentSummary s = summarize(report.scaled_errors, report.parameters);
    report.mean = std::move(s.mean);
    report.covariance = std::move(s.covariance);
    report.skewness = std::move(s.skewness);
    report.excess_kurtosis = std::move(s.excess_kurtosis);
  }
  return report;
}

SymMatrix sandwich_covariance(const Sample& p, const TConfig& cfg) {
  const InfluenceContext ctx(p, cfg);
  const Sample atoms = merge_duplicates(p);
  const std::size_t dim = cfg.dim() + pair_count(cfg.dim());
  SymMatrix out(dim);
  for (std::size_t i = 0; i < atoms.size(); ++i)
    out.add_outer(ctx.implicit(atoms.point(i)).flat(), atoms.weight(i));
  return out;
}

double location_scatter_loss(std::span<const double> y, std::span<const double> mu,
                             const PosDefMatrix& sigma, const TConfig& cfg) {
  Vector r(y.begin(), y.end());
  for (std::size_t k = 0; k < r.size(); ++k) r[k] -= mu[k];
  return 0.5 * sigma.log_det() + rho(sigma.quad_form(r), cfg) - rho(dot(y, y), cfg);
}

std::vector<GcRow> gc_diagnostic(const Sample& p, const TConfig& cfg, double radius,
                                 std::size_t grid_size, std::span<const std::size_t> n_list,
                                 std::uint64_t seed, const std::optional<GcCenter>& center) {
  if (!(radius >= 0.0 && radius < 1.0)) throw DomainError("gc_diagnostic: need 0 <= radius < 1");
  if (grid_size == 0) throw ConfigError("gc_diagnostic: grid_size must be positive");
  const std::size_t d = cfg.dim();
  GcCenter c;
  if (center) {
    c = *center;
  } else {
    const LocationScatterEstimate est = fit_location_scatter(p, cfg);
    c = GcCenter{est.mu, est.sigma};
  }
  const Matrix l = cholesky(c.sigma);

  struct GridPoint {
    Vector mu;
    PosDefMatrix sigma;
  };
  std::vector<GridPoint> grid;
  grid.push_back(GridPoint{c.mu, PosDefMatrix(c.sigma)});
  // Grid directions use a stream disjoint from the sampling streams.
  std::mt19937_64 rng = replicate_rng(seed, ~std::uint64_t{0});
  const std::size_t dims = d + d * d;
  while (grid.size() < grid_size) {
    Vector dir(dims);
    for (double& v : dir) v = standard_normal(rng);
    const double len = norm2(dir);
    const double r = radius * std::pow(uniform01(rng), 1.0 / static_cast<double>(dims));
    for (double& v : dir) v *= r / len;
    Vector mu = l * std::span<const double>(dir).first(d);
    for (std::size_t k = 0; k < d; ++k) mu[k] += c.mu[k];
    Matrix m = Matrix::identity(d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) m(i, j) += dir[d + i * d + j];
    const SymMatrix sigma = congruence(l * m, SymMatrix::identity(d));
    grid.push_back(GridPoint{std::move(mu), PosDefMatrix(sigma)});
  }

  auto expectation = [&](const Sample& law, const GridPoint& g) {
    double acc = 0.0;
    for (std::size_t i = 0; i < law.size(); ++i)
      acc += law.weight(i) * location_scatter_loss(law.point(i), g.mu, g.sigma, cfg);
    return acc;
  };
  const Sample pm = merge_duplicates(p);
  Vector population(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) population[g] = expectation(pm, grid[g]);

  std::vector<GcRow> out;
  for (std::size_t k = 0; k < n_list.size(); ++k) {
    std::mt19937_64 draw = replicate_rng(seed, k);
    const Sample pn = draw_empirical(p, n_list[k], draw);
    GcRow row{n_list[k], 0.0};
    for (std::size_t g = 0; g < grid.size(); ++g)
      row.sup_deviation = std::max(row.sup_deviation, std::abs(expectation(pn, grid[g]) - population[g]));
    out.push_back(row);
  }
  return out;
}

}  // namespace tscatter
