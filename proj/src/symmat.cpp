#include "tscatter/symmat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <numeric>

#include "tscatter/errors.hpp"

namespace tscatter {

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// ---------------------------------------------------------------- Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionError("Matrix: ragged rows");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Matrix::frobenius_norm() const { return norm2(data_); }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("Matrix product: shape mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Vector operator*(const Matrix& a, std::span<const double> v) {
  if (a.cols() != v.size()) throw DimensionError("Matrix-vector: shape mismatch");
  Vector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = dot(a.row(i), v);
  return out;
}

// ------------------------------------------------------------- SymMatrix

SymMatrix::SymMatrix(std::size_t dim) : dim_(dim), data_(dim * dim, 0.0) {}

SymMatrix::SymMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : SymMatrix(SymMatrix::from_matrix(Matrix(rows))) {}

SymMatrix SymMatrix::from_matrix(const Matrix& m, double rel_tol) {
  if (m.rows() != m.cols()) throw DimensionError("SymMatrix: matrix is not square");
  const std::size_t n = m.rows();
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(m(i, j))) throw DomainError("SymMatrix: non-finite entry");
      scale = std::max(scale, std::abs(m(i, j)));
    }
  SymMatrix s(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      if (std::abs(m(i, j) - m(j, i)) > rel_tol * scale)
        throw DomainError("SymMatrix: input is not symmetric");
      s.set(i, j, 0.5 * (m(i, j) + m(j, i)));
    }
  return s;
}

SymMatrix SymMatrix::identity(std::size_t dim) {
  SymMatrix s(dim);
  for (std::size_t i = 0; i < dim; ++i) s.set(i, i, 1.0);
  return s;
}

SymMatrix SymMatrix::diagonal(std::span<const double> diag) {
  SymMatrix s(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) s.set(i, i, diag[i]);
  return s;
}

void SymMatrix::add_outer(std::span<const double> y, double w) {
  if (y.size() != dim_) throw DimensionError("add_outer: size mismatch");
  for (std::size_t i = 0; i < dim_; ++i) {
    const double wyi = w * y[i];
    for (std::size_t j = i; j < dim_; ++j) {
      const double v = data_[i * dim_ + j] + wyi * y[j];
      data_[i * dim_ + j] = v;
      data_[j * dim_ + i] = v;
    }
  }
}

double SymMatrix::frobenius_norm() const { return norm2(data_); }

double SymMatrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double SymMatrix::max_diagonal() const {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dim_; ++i) m = std::max(m, (*this)(i, i));
  return m;
}

double SymMatrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

bool SymMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

Matrix SymMatrix::to_matrix() const {
  Matrix m(dim_, dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) m(i, j) = (*this)(i, j);
  return m;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
  if (o.dim_ != dim_) throw DimensionError("SymMatrix +=: size mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& o) {
  if (o.dim_ != dim_) throw DimensionError("SymMatrix -=: size mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

SymMatrix congruence(const Matrix& a, const SymMatrix& s) {
  if (a.cols() != s.dim()) throw DimensionError("congruence: shape mismatch");
  const Matrix as = a * s.to_matrix();
  SymMatrix out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i; j < a.rows(); ++j) out.set(i, j, dot(as.row(i), a.row(j)));
  return out;
}

// -------------------------------------------------------------- Cholesky

Matrix cholesky(const SymMatrix& m) {
  const std::size_t n = m.dim();
  if (!m.all_finite()) throw DomainError("cholesky: non-finite entry");
  const double floor = 1e-12 * m.max_diagonal();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double pivot = m(j, j);
    for (std::size_t k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
    if (!(pivot > floor) || !(pivot > 0.0))
      throw NotPositiveDefinite("cholesky: pivot " + std::to_string(j) +
                                " is not above the positive-definite floor");
    const double ljj = std::sqrt(pivot);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

PosDefMatrix::PosDefMatrix(SymMatrix m) : m_(std::move(m)), chol_(cholesky(m_)) {}

double PosDefMatrix::log_det() const {
  double s = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) s += std::log(chol_(i, i));
  return 2.0 * s;
}

namespace {

// Solves L x = b in place.
void forward_subst(const Matrix& l, std::span<double> x) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    double s = x[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x[k];
    x[i] = s / l(i, i);
  }
}

// Solves L' x = b in place.
void backward_subst(const Matrix& l, std::span<double> x) {
  for (std::size_t ii = x.size(); ii-- > 0;) {
    double s = x[ii];
    for (std::size_t k = ii + 1; k < x.size(); ++k) s -= l(k, ii) * x[k];
    x[ii] = s / l(ii, ii);
  }
}

}  // namespace

Vector PosDefMatrix::solve(std::span<const double> v) const {
  if (v.size() != dim()) throw DimensionError("solve: size mismatch");
  Vector x(v.begin(), v.end());
  forward_subst(chol_, x);
  backward_subst(chol_, x);
  return x;
}

double PosDefMatrix::quad_form(std::span<const double> y) const {
  if (y.size() != dim()) throw DimensionError("quad_form: size mismatch");
  Vector x(y.begin(), y.end());
  forward_subst(chol_, x);
  return dot(x, x);
}

SymMatrix PosDefMatrix::inverse() const {
  const std::size_t n = dim();
  SymMatrix inv(n);
  Vector e(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    const Vector col = solve(e);
    for (std::size_t i = j; i < n; ++i) inv.set(i, j, col[i]);
  }
  return inv;
}

double log_det(const PosDefMatrix& m) { return m.log_det(); }

Vector solve(const PosDefMatrix& m, std::span<const double> v) { return m.solve(v); }

// ---------------------------------------------------------------- Jacobi

SymEigen sym_eigen(const SymMatrix& m) {
  constexpr int kMaxSweeps = 100;
  const std::size_t n = m.dim();
  Matrix a = m.to_matrix();
  Matrix v = Matrix::identity(n);
  const double target = 1e-12 * m.frobenius_norm();

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  int sweep = 0;
  while (off_norm() > target) {
    if (++sweep > kMaxSweeps)
      throw ConvergenceFailure("sym_eigen: Jacobi sweeps exhausted");
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  SymEigen out{Vector(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

Vector sym_eigenvalues(const SymMatrix& m) { return sym_eigen(m).values; }

}  // namespace tscatter
