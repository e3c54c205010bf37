#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "tscatter/model.hpp"

namespace tscatter {

struct SolveReport {
  bool converged = false;
  std::size_t iterations = 0;
  double fixed_point_residual = 0.0;  // ||B - sum w u(y'B^{-1}y) y y'||_F
  double gradient_norm = 0.0;
  std::vector<double> objective_trace;
  std::vector<double> condition_number_trace;
  std::vector<double> min_eigenvalue_trace;
};

struct ScatterFit {
  PosDefMatrix b;
  SolveReport report;
};

struct LocationScatterEstimate {
  Vector mu;
  SymMatrix sigma;           // zero matrix when degenerate
  double gamma_check = 1.0;  // recovered A(d+1, d+1)
  double weight_sum = 1.0;   // sum_i w_i u(d_i), d_i the squared Mahalanobis distance
  bool degenerate = false;   // univariate point-mass extension
  SolveReport report;
};

/// Pure-scatter M-functional: the unique B with
///   B = sum_i w_i u(y_i' B^{-1} y_i) y_i y_i',
/// found by substitution iteration. Throws DomainViolation when Q is not in
/// U(d, a0) (unless the check is disabled) and NoConvergence otherwise.
ScatterFit fit_scatter(const Sample& q, const TConfig& cfg,
                       const std::optional<PosDefMatrix>& init = std::nullopt);

/// t location-scatter functional via the (d+1)-dimensional lift with
/// nu' = nu - 1. Requires nu > 1.
LocationScatterEstimate fit_location_scatter(const Sample& p, const TConfig& cfg);

/// d = 1 entry point: an atom of mass >= nu / (nu + 1) yields (x, 0).
LocationScatterEstimate fit_univariate(const Sample& p, const TConfig& cfg);

struct CriticalPointCheck {
  double fixed_point_residual = 0.0;
  double gradient_norm = 0.0;
};

CriticalPointCheck verify_critical_point(const Sample& q, const PosDefMatrix& b,
                                         const TConfig& cfg);

/// Runs fit_scatter from k random starts G G' + 0.1 I; true iff all land
/// within 1e-6 (Frobenius) of one another.
bool multistart_uniqueness_probe(const Sample& q, const TConfig& cfg, std::size_t k,
                                 std::uint64_t seed);

/// Lifted-space fit retained for the calculus module.
struct LiftedFit {
  Sample lifted;
  TConfig lifted_cfg;
  ScatterFit scatter;
  LocationScatterEstimate estimate;
};
LiftedFit fit_lifted(const Sample& p, const TConfig& cfg,
                     const std::optional<PosDefMatrix>& init = std::nullopt);

}  // namespace tscatter
