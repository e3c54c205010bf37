#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tscatter {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Cholesky pivot at or below the scale-relative floor.
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

// Iterative eigen-solver exhausted its sweep budget.
class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

// Scalar argument outside the domain of a function (s < 0, gamma <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// The exact subspace search would exceed its enumeration budget.
class ExplicitLimitation : public Error {
 public:
  using Error::Error;
};

/// Raised when a law lies outside the existence domain of the functional.
/// Carries the extremal subspace that violates its mass threshold.
class DomainViolation : public Error {
 public:
  DomainViolation(const std::string& what, int subspace_dim, double mass,
                  double threshold, std::vector<std::size_t> witness)
      : Error(what),
        subspace_dim_(subspace_dim),
        mass_(mass),
        threshold_(threshold),
        witness_(std::move(witness)) {}

  int subspace_dim() const { return subspace_dim_; }
  double mass() const { return mass_; }
  double threshold() const { return threshold_; }
  const std::vector<std::size_t>& witness() const { return witness_; }

 private:
  int subspace_dim_;
  double mass_;
  double threshold_;
  std::vector<std::size_t> witness_;
};

/// Fixed-point iteration stopped without meeting its tolerances.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, std::size_t iterations,
                double residual, std::vector<double> min_eigenvalue_trace)
      : Error(what),
        iterations_(iterations),
        residual_(residual),
        min_eigenvalue_trace_(std::move(min_eigenvalue_trace)) {}

  std::size_t iterations() const { return iterations_; }
  double residual() const { return residual_; }
  const std::vector<double>& min_eigenvalue_trace() const {
    return min_eigenvalue_trace_;
  }

 private:
  std::size_t iterations_;
  double residual_;
  std::vector<double> min_eigenvalue_trace_;
};

}  // namespace tscatter
