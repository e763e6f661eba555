#pragma once

#include <vector>

#include "diffnet/errors.hpp"

namespace diffnet {

using Vector = std::vector<double>;

// Dense row-major matrix. Just enough linear algebra for designs with a small
// number of columns; not a general BLAS replacement.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

  const double* row(int i) const { return data_.data() + static_cast<std::size_t>(i) * cols_; }
  double* row(int i) { return data_.data() + static_cast<std::size_t>(i) * cols_; }

  const std::vector<double>& data() const { return data_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// Symmetric matrix with mirrored writes, so (i,j) == (j,i) holds exactly.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int dim, double fill = 0.0)
      : dim_(dim), data_(static_cast<std::size_t>(dim) * dim, fill) {}

  int dim() const { return dim_; }

  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * dim_ + j]; }

  void set(int i, int j, double v) {
    data_[static_cast<std::size_t>(i) * dim_ + j] = v;
    data_[static_cast<std::size_t>(j) * dim_ + i] = v;
  }

  void add(int i, int j, double v) { set(i, j, (*this)(i, j) + v); }

  SymMatrix scaled(double s) const {
    SymMatrix out(dim_);
    for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] = data_[k] * s;
    return out;
  }

 private:
  int dim_ = 0;
  std::vector<double> data_;
};

// Standard normal CDF, absolute error below 1e-12; saturates to 0/1 in the
// far tails instead of erroring.
double norm_cdf(double x);

// Standard normal density.
double norm_pdf(double x);

// Standard normal quantile function on (0, 1).
double norm_ppf(double p);

// Cholesky factor of a symmetric positive definite matrix. Factor once, solve
// many right-hand sides. Throws NotPositiveDefinite when a pivot falls at or
// below 1e-12 times the largest diagonal entry.
class CholeskyFactor {
 public:
  explicit CholeskyFactor(const SymMatrix& a);

  int dim() const { return dim_; }
  Vector solve(const Vector& b) const;

 private:
  int dim_ = 0;
  std::vector<double> lower_;
};

// One-shot SPD solve, relative residual below 1e-10 for well-scaled inputs.
Vector solve_spd(const SymMatrix& a, const Vector& b);

struct SymEigen {
  Vector values;   // eigenvalues, descending
  Matrix vectors;  // orthonormal eigenvectors in matching columns
};

// Cyclic Jacobi eigendecomposition; throws NoConvergence when the sweep
// budget is exhausted (pathological input).
SymEigen sym_eig(const SymMatrix& a);

struct PsdSqrt {
  SymMatrix root;
  int clipped_eigenvalues = 0;  // negative eigenvalues clipped to zero
};

// Positive semidefinite square root V diag(sqrt(max(lambda, 0))) V'.
PsdSqrt psd_sqrt(const SymMatrix& a);

// ceil(q * B)-th order statistic of the sample, q in (0, 1). Ties resolve by
// sort order. Throws EmptySample / InvalidConfig.
double empirical_percentile(const Vector& samples, double q);

inline double dot(const double* a, const double* b, int k) {
  double s = 0.0;
  for (int i = 0; i < k; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace diffnet
