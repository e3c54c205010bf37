#include "tscatter/counterexample.hpp"

#include "tscatter/errors.hpp"
#include "tscatter/solver.hpp"

namespace tscatter {

Sample make_Pk(int k) {
  if (k < 1) throw DomainError("make_Pk: k must be >= 1");
  const double e = 1.0 / k;
  return Sample({{-1.0, -e}, {-1.0, e}, {1.0, -e}, {1.0, e}, {0.0, 0.0}},
                {1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 3});
}

Sample make_Qk(int k) {
  if (k < 1) throw DomainError("make_Qk: k must be >= 1");
  const double e = 1.0 / k;
  return Sample({{-1.0, 0.0}, {0.0, -e}, {0.0, e}, {1.0, 0.0}},
                {1.0 / 3, 1.0 / 6, 1.0 / 6, 1.0 / 3});
}

LimitTriple limits(const TConfig& cfg) {
  if (cfg.dim() != 2) throw ConfigError("limits: the sequences live in R^2");
  const double nu = cfg.nu();
  if (!(nu > 1.0)) throw ConfigError("limits: requires nu > 1");
  return LimitTriple{2.0 * (1.0 - 1.0 / nu) / 3.0, (2.0 + 1.0 / nu) / 3.0, (1.0 - 1.0 / nu) / 3.0};
}

std::vector<SweepRow> counterexample_sweep(const TConfig& cfg, std::span<const int> ks) {
  limits(cfg);
  std::vector<SweepRow> rows;
  for (int k : ks) {
    const LocationScatterEstimate p = fit_location_scatter(make_Pk(k), cfg);
    const LocationScatterEstimate q = fit_location_scatter(make_Qk(k), cfg);
    rows.push_back(SweepRow{k, p.mu, p.sigma, q.mu, q.sigma});
  }
  return rows;
}

}  // namespace tscatter
