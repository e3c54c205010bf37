#pragma once

// Generators and brute-force oracles shared by the unit and acceptance
// suites. Nothing here calls into the code paths it is used to check.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "tscatter/model.hpp"
#include "tscatter/symmat.hpp"

namespace tscatter::fixtures {

inline std::vector<Vector> gaussian_points(std::mt19937_64& rng, std::size_t n, std::size_t d) {
  std::normal_distribution<double> normal;
  std::vector<Vector> pts(n, Vector(d));
  for (auto& p : pts)
    for (double& c : p) c = normal(rng);
  return pts;
}

inline Sample gaussian_sample(std::mt19937_64& rng, std::size_t n, std::size_t d) {
  return Sample::uniform(gaussian_points(rng, n, d));
}

inline Matrix gaussian_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::normal_distribution<double> normal;
  Matrix g(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) g(i, j) = normal(rng);
  return g;
}

/// G G' + eps I.
inline SymMatrix random_pd(std::mt19937_64& rng, std::size_t d, double eps = 0.1) {
  const Matrix g = gaussian_matrix(rng, d, d);
  SymMatrix m(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += g(i, k) * g(j, k);
      m.set(i, j, s + (i == j ? eps : 0.0));
    }
  return m;
}

/// Rank by Gaussian elimination with partial pivoting.
inline std::size_t matrix_rank(std::vector<Vector> rows, double tol = 1e-9) {
  if (rows.empty()) return 0;
  const std::size_t cols = rows.front().size();
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
    std::size_t piv = rank;
    for (std::size_t r = rank; r < rows.size(); ++r)
      if (std::abs(rows[r][c]) > std::abs(rows[piv][c])) piv = r;
    if (std::abs(rows[piv][c]) <= tol) continue;
    std::swap(rows[piv], rows[rank]);
    for (std::size_t r = rank + 1; r < rows.size(); ++r) {
      const double f = rows[r][c] / rows[rank][c];
      for (std::size_t k = c; k < cols; ++k) rows[r][k] -= f * rows[rank][k];
    }
    ++rank;
  }
  return rank;
}

/// Largest mass of an atom subset whose affine (or linear) rank is <= q.
/// Exponential in the number of atoms; fine for n <= 12.
inline double brute_force_subspace_mass(const Sample& p, int q, bool affine) {
  const std::size_t n = p.size();
  double best = 0.0;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<Vector> rows;
    const Vector* base = nullptr;
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask & (1u << i))) continue;
      mass += p.weight(i);
      if (!affine) {
        rows.push_back(p.point(i));
      } else if (base == nullptr) {
        base = &p.point(i);
      } else {
        Vector v = p.point(i);
        for (std::size_t k = 0; k < v.size(); ++k) v[k] -= (*base)[k];
        rows.push_back(std::move(v));
      }
    }
    if (matrix_rank(rows) <= static_cast<std::size_t>(q)) best = std::max(best, mass);
  }
  return best;
}

/// Integer-lattice points: plenty of collinear and coplanar subsets.
inline Sample lattice_sample(std::mt19937_64& rng, std::size_t n, std::size_t d, int span = 2) {
  std::uniform_int_distribution<int> coord(-span, span);
  std::uniform_int_distribution<int> mult(1, 3);
  std::vector<Vector> pts(n, Vector(d));
  Vector w(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (double& c : pts[i]) c = coord(rng);
    w[i] = mult(rng);
    total += w[i];
  }
  for (double& x : w) x /= total;
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) s += w[i];
  w[n - 1] = 1.0 - s;
  return Sample(std::move(pts), std::move(w));
}

inline double max_abs_diff(const SymMatrix& a, const SymMatrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

}  // namespace tscatter::fixtures
