#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace hpq {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  Matrix transposed() const;
  Vector column(std::size_t j) const;
  Matrix columns(const std::vector<std::size_t>& idx) const;
  bool all_finite() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Vector helpers.
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);
double norm1(std::span<const double> v);
double norm_inf(std::span<const double> v);
bool all_finite(std::span<const double> v);

Vector matvec(const Matrix& A, const Vector& x);             // A x
Vector matvec_transposed(const Matrix& A, const Vector& y);  // A^T y
Vector residual(const Matrix& A, const Vector& x, const Vector& b);  // A x - b

/// Weighted Gram matrix A diag(f) A^T (f entrywise nonnegative).
/// The hot kernel of every IRLS step; parallel over output rows.
Matrix gram_weighted(const Matrix& A, const Vector& f);
Matrix gram_weighted_serial(const Matrix& A, const Vector& f);

/// Rank-revealing Cholesky of a symmetric PSD matrix with diagonal
/// pivoting: P^T G P = L L^T with L m x rank lower trapezoidal.
class PsdCholesky {
 public:
  /// Factors G; pivots below rel_pivot_tol times the largest initial
  /// diagonal are treated as zero. Returns the numerical rank.
  std::size_t factor(const Matrix& G, double rel_pivot_tol = 1e-14);

  std::size_t rank() const { return rank_; }
  std::size_t size() const { return n_; }

  /// Solves G y = b for b in range(G); the particular solution returned is
  /// zero on the deficient pivot coordinates. Returns false when b has a
  /// component outside range(G) larger than consistency_tol.
  bool solve(const Vector& b, Vector& y, double consistency_tol) const;

 private:
  std::size_t n_ = 0;
  std::size_t rank_ = 0;
  std::vector<double> work_;           // pivoted working copy, L in lower part
  std::vector<std::size_t> perm_;      // pivoted position -> original index
};

/// Minimum-norm least squares min ||E z - b||_2 via column-pivoted
/// Householder QR plus an LQ pass on the rank-revealed rows; among all
/// minimizers the returned z has minimum 2-norm.
Vector least_squares_minnorm(const Matrix& E, const Vector& b,
                             double rank_rel_tol = 1e-12);

/// Orthonormal basis of ker(A) as matrix columns (n x nullity).
Matrix nullspace_basis(const Matrix& A, double rank_rel_tol = 1e-12);

/// Numerical rank via column-pivoted QR.
std::size_t matrix_rank(const Matrix& A, double rank_rel_tol = 1e-12);

/// Eigenvalues of a small symmetric matrix (cyclic Jacobi), ascending.
std::vector<double> symmetric_eigenvalues(const Matrix& S);

}  // namespace hpq
