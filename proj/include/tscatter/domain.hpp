#pragma once

// Exact membership tests for the existence domains of the t functionals.
//
// A law Q on R^d is in U(d, a0) when every linear subspace of dimension
// q < d carries mass below 1 - (d - q) / a0; P is in V(d, a0) under the same
// bound for affine subspaces. For finite laws the extremal subspace is
// always spanned by atoms, so the search enumerates atom subsets.

#include <cstddef>
#include <vector>

#include "tscatter/model.hpp"

namespace tscatter {

struct SubspaceMass {
  double mass = 0.0;
  std::vector<std::size_t> witness;  // indices of atoms in the subspace
};

struct DimensionCheck {
  int q = 0;
  double max_mass = 0.0;
  double threshold = 0.0;
  std::vector<std::size_t> witness;
};

struct DomainReport {
  bool member = false;
  bool affine = false;
  double a0 = 0.0;
  std::vector<DimensionCheck> per_dimension;  // q = 0 .. d-1

  /// First q whose mass reaches its threshold, or nullptr.
  const DimensionCheck* first_violation() const;
};

/// Atoms closer than this are merged before the search.
inline constexpr double kAtomMergeDistance = 1e-12;
/// Masses within this of the threshold count as violations.
inline constexpr double kThresholdSlack = 1e-12;
/// Largest number of candidate spanning subsets the search will visit.
inline constexpr double kMaxSubsets = 1e6;

/// Maximum total weight on a single q-dimensional affine (or linear)
/// subspace. Throws DimensionError if q >= d and ExplicitLimitation when
/// the enumeration would exceed kMaxSubsets.
SubspaceMass max_subspace_mass(const Sample& p, int q, bool affine);

/// Affine-subspace domain; requires a0 = nu + d > d + 1.
DomainReport in_V(const Sample& p, const TConfig& cfg);

/// Linear-subspace domain; requires a0 > d.
DomainReport in_U(const Sample& q, const TConfig& cfg);

/// Mass outside the ball of radius m is at most (1 - delta) / (nu + d).
bool tail_condition(const Sample& p, double m, double delta, const TConfig& cfg);

/// Throws DomainViolation describing the first failing q.
[[noreturn]] void throw_violation(const DomainReport& report);

}  // namespace tscatter
