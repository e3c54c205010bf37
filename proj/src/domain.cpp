#include "tscatter/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "tscatter/errors.hpp"

namespace tscatter {
namespace {

struct Atom {
  Vector x;
  double weight = 0.0;
  std::vector<std::size_t> members;
};

std::vector<Atom> dedupe(const Sample& p) {
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.weight(i) == 0.0) continue;
    const Vector& x = p.point(i);
    auto hit = std::find_if(atoms.begin(), atoms.end(), [&](const Atom& a) {
      double s = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) s += (a.x[k] - x[k]) * (a.x[k] - x[k]);
      return std::sqrt(s) < kAtomMergeDistance;
    });
    if (hit == atoms.end()) {
      atoms.push_back(Atom{x, p.weight(i), {i}});
    } else {
      hit->weight += p.weight(i);
      hit->members.push_back(i);
    }
  }
  return atoms;
}

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  double c = 1.0;
  for (std::size_t i = 0; i < k; ++i)
    c = c * static_cast<double>(n - i) / static_cast<double>(i + 1);
  return c;
}

bool in_span(const std::vector<Vector>& basis, const Vector& base, const Vector& x) {
  Vector r(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) r[k] = x[k] - base[k];
  for (const Vector& e : basis) {
    const double c = dot(r, e);
    for (std::size_t k = 0; k < r.size(); ++k) r[k] -= c * e[k];
  }
  return norm2(r) < 1e-9 * (1.0 + norm2(x));
}

// Orthonormal basis of span{v - base : v in chosen}, modified Gram-Schmidt.
std::vector<Vector> span_basis(const std::vector<Atom>& atoms,
                               const std::vector<std::size_t>& chosen, const Vector& base) {
  std::vector<Vector> basis;
  for (std::size_t idx : chosen) {
    const Vector& x = atoms[idx].x;
    Vector v(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) v[k] = x[k] - base[k];
    const double scale = norm2(v);
    for (const Vector& e : basis) {
      const double c = dot(v, e);
      for (std::size_t k = 0; k < v.size(); ++k) v[k] -= c * e[k];
    }
    const double r = norm2(v);
    if (r < 1e-9 * (1.0 + scale)) continue;
    for (double& c : v) c /= r;
    basis.push_back(std::move(v));
  }
  return basis;
}

// Advances an increasing index combination; false when exhausted.
bool next_combination(std::vector<std::size_t>& c, std::size_t n) {
  const std::size_t k = c.size();
  for (std::size_t i = k; i-- > 0;) {
    if (c[i] < n - k + i) {
      ++c[i];
      for (std::size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

SubspaceMass collect(const std::vector<Atom>& atoms, const std::vector<bool>& inside) {
  SubspaceMass out;
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    if (!inside[a]) continue;
    out.mass += atoms[a].weight;
    out.witness.insert(out.witness.end(), atoms[a].members.begin(), atoms[a].members.end());
  }
  std::sort(out.witness.begin(), out.witness.end());
  return out;
}

DomainReport check(const Sample& p, const TConfig& cfg, bool affine) {
  const std::size_t d = p.dim();
  DomainReport report;
  report.affine = affine;
  report.a0 = cfg.a0();
  report.member = true;
  for (std::size_t q = 0; q < d; ++q) {
    SubspaceMass m = max_subspace_mass(p, static_cast<int>(q), affine);
    DimensionCheck c;
    c.q = static_cast<int>(q);
    c.max_mass = m.mass;
    c.threshold = 1.0 - static_cast<double>(d - q) / cfg.a0();
    c.witness = std::move(m.witness);
    if (!(c.max_mass < c.threshold - kThresholdSlack)) report.member = false;
    report.per_dimension.push_back(std::move(c));
  }
  return report;
}

}  // namespace

const DimensionCheck* DomainReport::first_violation() const {
  for (const DimensionCheck& c : per_dimension)
    if (!(c.max_mass < c.threshold - kThresholdSlack)) return &c;
  return nullptr;
}

SubspaceMass max_subspace_mass(const Sample& p, int q, bool affine) {
  const std::size_t d = p.dim();
  if (q < 0 || static_cast<std::size_t>(q) >= d)
    throw DimensionError("max_subspace_mass: need 0 <= q < d");
  const std::vector<Atom> atoms = dedupe(p);
  const std::size_t n = atoms.size();
  const std::size_t k = affine ? static_cast<std::size_t>(q) + 1 : static_cast<std::size_t>(q);

  if (n <= k) return collect(atoms, std::vector<bool>(n, true));
  if (binomial(n, k) > kMaxSubsets)
    throw ExplicitLimitation("max_subspace_mass: C(" + std::to_string(n) + ", " +
                             std::to_string(k) + ") candidate subspaces exceed the limit");

  SubspaceMass best;
  best.mass = -1.0;
  std::vector<std::size_t> chosen(k);
  std::iota(chosen.begin(), chosen.end(), 0);
  const Vector origin(d, 0.0);
  std::vector<bool> inside(n);
  do {
    const Vector& base = affine ? atoms[chosen.front()].x : origin;
    const std::vector<Vector> basis = span_basis(atoms, chosen, base);
    double mass = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      inside[a] = in_span(basis, base, atoms[a].x);
      if (inside[a]) mass += atoms[a].weight;
    }
    if (mass > best.mass) best = collect(atoms, inside);
  } while (k > 0 && next_combination(chosen, n));
  return best;
}

DomainReport in_V(const Sample& p, const TConfig& cfg) {
  if (p.dim() != cfg.dim()) throw DimensionError("in_V: sample and config dimensions differ");
  if (!(cfg.a0() > static_cast<double>(cfg.dim()) + 1.0))
    throw ConfigError("in_V: requires a0 > d + 1");
  return check(p, cfg, /*affine=*/true);
}

DomainReport in_U(const Sample& q, const TConfig& cfg) {
  if (q.dim() != cfg.dim()) throw DimensionError("in_U: sample and config dimensions differ");
  if (!(cfg.a0() > static_cast<double>(cfg.dim())))
    throw ConfigError("in_U: requires a0 > d");
  return check(q, cfg, /*affine=*/false);
}

bool tail_condition(const Sample& p, double m, double delta, const TConfig& cfg) {
  if (!(m > 0.0)) throw DomainError("tail_condition: M must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("tail_condition: need 0 < delta < 1");
  double outside = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (norm2(p.point(i)) > m) outside += p.weight(i);
  return outside <= (1.0 - delta) / (cfg.nu() + static_cast<double>(cfg.dim()));
}

void throw_violation(const DomainReport& report) {
  const DimensionCheck* c = report.first_violation();
  if (c == nullptr) throw Error("throw_violation: report has no violation");
  std::ostringstream msg;
  msg << "law is outside the existence domain: a " << c->q << "-dimensional "
      << (report.affine ? "affine" : "linear") << " subspace carries mass " << c->max_mass
      << " >= " << c->threshold;
  throw DomainViolation(msg.str(), c->q, c->max_mass, c->threshold, c->witness);
}

}  // namespace tscatter
