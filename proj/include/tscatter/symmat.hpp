#pragma once

// Small dense linear-algebra kernel. Dimensions here are tiny (d <= ~50),
// so everything is plain row-major storage and O(d^3) routines.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace tscatter {

using Vector = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

/// General rows x cols matrix, row-major.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }
  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  Matrix transpose() const;
  double frobenius_norm() const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> v);

/// Square symmetric matrix. Writes go through set(), which updates both
/// (i,j) and (j,i), so the symmetry is exact.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t dim);
  /// Throws Error if rows are ragged, entries non-finite, or the input is
  /// not symmetric to within 1e-12 relative; the stored matrix is the
  /// symmetrized input.
  SymMatrix(std::initializer_list<std::initializer_list<double>> rows);
  static SymMatrix from_matrix(const Matrix& m, double rel_tol = 1e-12);

  static SymMatrix identity(std::size_t dim);
  static SymMatrix diagonal(std::span<const double> diag);

  std::size_t dim() const { return dim_; }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * dim_ + j];
  }
  void set(std::size_t i, std::size_t j, double v) {
    data_[i * dim_ + j] = v;
    data_[j * dim_ + i] = v;
  }
  /// this += w * y y'
  void add_outer(std::span<const double> y, double w);

  double frobenius_norm() const;
  double max_abs() const;
  double max_diagonal() const;
  double trace() const;
  bool all_finite() const;
  Matrix to_matrix() const;

  SymMatrix& operator+=(const SymMatrix& o);
  SymMatrix& operator-=(const SymMatrix& o);
  SymMatrix& operator*=(double s);

  bool operator==(const SymMatrix&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

SymMatrix operator+(SymMatrix a, const SymMatrix& b);
SymMatrix operator-(SymMatrix a, const SymMatrix& b);
SymMatrix operator*(double s, SymMatrix a);

/// A * S * A'. A may be rectangular or singular.
SymMatrix congruence(const Matrix& a, const SymMatrix& s);

/// Lower Cholesky factor L with L L' = M. Throws NotPositiveDefinite when a
/// pivot falls at or below 1e-12 * max(diag(M)).
Matrix cholesky(const SymMatrix& m);

/// Symmetric positive-definite matrix with its Cholesky factor cached.
class PosDefMatrix {
 public:
  explicit PosDefMatrix(SymMatrix m);

  std::size_t dim() const { return m_.dim(); }
  const SymMatrix& matrix() const { return m_; }
  const Matrix& cholesky_factor() const { return chol_; }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

  double log_det() const;
  Vector solve(std::span<const double> v) const;
  /// y' M^{-1} y, via one triangular solve.
  double quad_form(std::span<const double> y) const;
  SymMatrix inverse() const;

 private:
  SymMatrix m_;
  Matrix chol_;
};

double log_det(const PosDefMatrix& m);
Vector solve(const PosDefMatrix& m, std::span<const double> v);

struct SymEigen {
  Vector values;   // ascending
  Matrix vectors;  // column k pairs with values[k]
};

/// Cyclic Jacobi. Throws ConvergenceFailure if the off-diagonal norm does
/// not drop below 1e-12 * ||M||_F within the sweep budget.
SymEigen sym_eigen(const SymMatrix& m);
Vector sym_eigenvalues(const SymMatrix& m);

}  // namespace tscatter
