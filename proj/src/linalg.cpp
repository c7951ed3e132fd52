#include "hpq/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hpq/error.hpp"

namespace hpq {

Matrix Matrix::identity(std::size_t n) {
  Matrix I(n, n);
  for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
  return I;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  std::size_t r = rows.size();
  std::size_t c = r ? rows.begin()->size() : 0;
  Matrix M(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    require(row.size() == c, ErrorCode::DimensionMismatch, "ragged initializer");
    std::size_t j = 0;
    for (double v : row) M(i, j++) = v;
    ++i;
  }
  return M;
}

Matrix Matrix::transposed() const {
  Matrix T(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) T(j, i) = (*this)(i, j);
  return T;
}

Vector Matrix::column(std::size_t j) const {
  Vector c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

Matrix Matrix::columns(const std::vector<std::size_t>& idx) const {
  Matrix M(rows_, idx.size());
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) M(i, j) = (*this)(i, idx[j]);
  return M;
}

bool Matrix::all_finite() const { return hpq::all_finite(data_); }

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

double norm1(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

double norm_inf(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

Vector matvec(const Matrix& A, const Vector& x) {
  require(x.size() == A.cols(), ErrorCode::DimensionMismatch, "matvec shape");
  Vector y(A.rows());
  for (std::size_t i = 0; i < A.rows(); ++i) y[i] = dot(A.row(i), x);
  return y;
}

Vector matvec_transposed(const Matrix& A, const Vector& y) {
  require(y.size() == A.rows(), ErrorCode::DimensionMismatch, "matvec_transposed shape");
  Vector x(A.cols(), 0.0);
  for (std::size_t i = 0; i < A.rows(); ++i) {
    const double yi = y[i];
    auto row = A.row(i);
    for (std::size_t j = 0; j < A.cols(); ++j) x[j] += row[j] * yi;
  }
  return x;
}

Vector residual(const Matrix& A, const Vector& x, const Vector& b) {
  Vector r = matvec(A, x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

namespace {

// Shared body; entries are independent dots so the parallel and serial
// variants produce identical bits.
Matrix gram_weighted_impl(const Matrix& A, const Vector& f, bool parallel) {
  require(f.size() == A.cols(), ErrorCode::DimensionMismatch, "gram weight length");
  const std::size_t m = A.rows(), n = A.cols();
  Matrix B(m, n);
  for (std::size_t j = 0; j < n; ++j) {
    if (!(f[j] >= 0.0)) fail(ErrorCode::OutOfRange, "negative gram weight");
  }
  Vector s(n);
  for (std::size_t j = 0; j < n; ++j) s[j] = std::sqrt(f[j]);
  for (std::size_t i = 0; i < m; ++i) {
    auto src = A.row(i);
    auto dst = B.row(i);
    for (std::size_t j = 0; j < n; ++j) dst[j] = src[j] * s[j];
  }
  Matrix G(m, m);
#pragma omp parallel for schedule(static) if (parallel)
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c <= r; ++c) G(r, c) = dot(B.row(r), B.row(c));
  }
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = r + 1; c < m; ++c) G(r, c) = G(c, r);
  return G;
}

}  // namespace

Matrix gram_weighted(const Matrix& A, const Vector& f) {
  return gram_weighted_impl(A, f, true);
}

Matrix gram_weighted_serial(const Matrix& A, const Vector& f) {
  return gram_weighted_impl(A, f, false);
}

std::size_t PsdCholesky::factor(const Matrix& G, double rel_pivot_tol) {
  require(G.rows() == G.cols(), ErrorCode::DimensionMismatch, "cholesky: not square");
  n_ = G.rows();
  work_ = G.data();
  perm_.resize(n_);
  for (std::size_t i = 0; i < n_; ++i) perm_[i] = i;

  auto w = [&](std::size_t i, std::size_t j) -> double& { return work_[i * n_ + j]; };

  double max_diag0 = 0.0;
  for (std::size_t i = 0; i < n_; ++i) max_diag0 = std::max(max_diag0, w(i, i));
  const double threshold = rel_pivot_tol * std::max(max_diag0, 0.0);

  rank_ = n_;
  for (std::size_t k = 0; k < n_; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n_; ++i)
      if (w(i, i) > w(p, p)) p = i;
    if (!(w(p, p) > threshold)) {
      rank_ = k;
      break;
    }
    if (p != k) {
      for (std::size_t j = 0; j < n_; ++j) std::swap(w(k, j), w(p, j));
      for (std::size_t i = 0; i < n_; ++i) std::swap(w(i, k), w(i, p));
      std::swap(perm_[k], perm_[p]);
    }
    const double lkk = std::sqrt(w(k, k));
    w(k, k) = lkk;
    for (std::size_t i = k + 1; i < n_; ++i) w(i, k) /= lkk;
    // Both triangles of the trailing block stay in sync so the symmetric
    // pivot swaps remain valid.
    for (std::size_t i = k + 1; i < n_; ++i) {
      const double lik = w(i, k);
      for (std::size_t j = k + 1; j <= i; ++j) {
        const double v = w(i, j) - lik * w(j, k);
        w(i, j) = v;
        if (j != i) w(j, i) = v;
      }
    }
  }
  return rank_;
}

bool PsdCholesky::solve(const Vector& b, Vector& y, double consistency_tol) const {
  require(b.size() == n_, ErrorCode::DimensionMismatch, "cholesky solve shape");
  auto w = [&](std::size_t i, std::size_t j) -> double { return work_[i * n_ + j]; };

  Vector bp(n_);
  for (std::size_t i = 0; i < n_; ++i) bp[i] = b[perm_[i]];

  // Forward solve on the rank block.
  Vector u(rank_);
  for (std::size_t k = 0; k < rank_; ++k) {
    double s = bp[k];
    for (std::size_t j = 0; j < k; ++j) s -= w(k, j) * u[j];
    u[k] = s / w(k, k);
  }
  // Rows beyond the rank must be consistent with the block solution.
  bool consistent = true;
  for (std::size_t i = rank_; i < n_; ++i) {
    double s = bp[i];
    for (std::size_t j = 0; j < rank_; ++j) s -= w(i, j) * u[j];
    if (std::abs(s) > consistency_tol) consistent = false;
  }
  // Back substitution; deficient coordinates pinned to zero.
  Vector yp(n_, 0.0);
  for (std::size_t k = rank_; k-- > 0;) {
    double s = u[k];
    for (std::size_t j = k + 1; j < rank_; ++j) s -= w(j, k) * yp[j];
    yp[k] = s / w(k, k);
  }
  y.assign(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) y[perm_[i]] = yp[i];
  return consistent;
}

namespace {

// Householder QR with column pivoting. R overwrites the upper triangle of
// work; reflector k is stored in column k below the diagonal with unit
// leading entry implied, scale in beta[k].
struct Cpqr {
  std::size_t m = 0, s = 0, rank = 0;
  std::vector<double> work;       // m x s
  std::vector<double> beta;       // reflector scales
  std::vector<std::size_t> piv;   // working column -> original column

  double& at(std::size_t i, std::size_t j) { return work[i * s + j]; }
  double at(std::size_t i, std::size_t j) const { return work[i * s + j]; }

  void factor(const Matrix& E, double rank_rel_tol) {
    m = E.rows();
    s = E.cols();
    work = E.data();
    piv.resize(s);
    for (std::size_t j = 0; j < s; ++j) piv[j] = j;
    const std::size_t kmax = std::min(m, s);
    beta.assign(kmax, 0.0);

    Vector colsq(s, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < s; ++j) colsq[j] += at(i, j) * at(i, j);
    double max0 = 0.0;
    for (double v : colsq) max0 = std::max(max0, v);
    const double threshold = rank_rel_tol * rank_rel_tol * max0;

    rank = kmax;
    for (std::size_t k = 0; k < kmax; ++k) {
      // Recompute trailing column norms; cheap at the sizes we run.
      std::size_t best = k;
      double best_sq = -1.0;
      for (std::size_t j = k; j < s; ++j) {
        double sq = 0.0;
        for (std::size_t i = k; i < m; ++i) sq += at(i, j) * at(i, j);
        if (sq > best_sq) {
          best_sq = sq;
          best = j;
        }
      }
      if (!(best_sq > threshold)) {
        rank = k;
        break;
      }
      if (best != k) {
        for (std::size_t i = 0; i < m; ++i) std::swap(at(i, k), at(i, best));
        std::swap(piv[k], piv[best]);
      }
      // Build the reflector for column k.
      double alpha = std::sqrt(best_sq);
      if (at(k, k) > 0) alpha = -alpha;
      const double v0 = at(k, k) - alpha;
      beta[k] = -v0 / alpha;  // beta = 2 / (v^T v) with v scaled so v[0] = 1
      at(k, k) = alpha;
      for (std::size_t i = k + 1; i < m; ++i) at(i, k) /= v0;
      // Apply to the trailing columns.
      for (std::size_t j = k + 1; j < s; ++j) {
        double t = at(k, j);
        for (std::size_t i = k + 1; i < m; ++i) t += at(i, k) * at(i, j);
        t *= beta[k];
        at(k, j) -= t;
        for (std::size_t i = k + 1; i < m; ++i) at(i, j) -= at(i, k) * t;
      }
    }
  }

  // y <- Q^T y using the stored reflectors.
  void apply_qt(Vector& y) const {
    for (std::size_t k = 0; k < rank; ++k) {
      double t = y[k];
      for (std::size_t i = k + 1; i < m; ++i) t += at(i, k) * y[i];
      t *= beta[k];
      y[k] -= t;
      for (std::size_t i = k + 1; i < m; ++i) y[i] -= at(i, k) * t;
    }
  }

  // y <- Q y (reflectors in reverse order).
  void apply_q(Vector& y) const {
    for (std::size_t k = rank; k-- > 0;) {
      double t = y[k];
      for (std::size_t i = k + 1; i < m; ++i) t += at(i, k) * y[i];
      t *= beta[k];
      y[k] -= t;
      for (std::size_t i = k + 1; i < m; ++i) y[i] -= at(i, k) * t;
    }
  }
};

}  // namespace

Vector least_squares_minnorm(const Matrix& E, const Vector& b, double rank_rel_tol) {
  require(b.size() == E.rows(), ErrorCode::DimensionMismatch, "least squares shape");
  const std::size_t s = E.cols();
  if (s == 0) return {};

  Cpqr qr;
  qr.factor(E, rank_rel_tol);
  const std::size_t r = qr.rank;
  Vector z(s, 0.0);
  if (r == 0) return z;

  Vector c = b;
  qr.apply_qt(c);
  c.resize(r);

  // R1 = R[0:r, 0:s] has full row rank; the minimum-norm solution of
  // R1 zp = c comes from an LQ pass, i.e. plain QR of R1^T.
  Matrix R1t(s, r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = i; j < s; ++j) R1t(j, i) = qr.at(i, j);
  Cpqr lq;
  lq.factor(R1t, 0.0);  // full row rank by construction; no truncation
  require(lq.rank == r, ErrorCode::Internal, "lq rank drop");
  // R1^T = Q2 R2 (with column pivoting piv2 on the r columns).
  // Solve R2^T w = c permuted, then zp = Q2 [w; 0].
  Vector w(r, 0.0);
  for (std::size_t k = 0; k < r; ++k) {
    double t = c[lq.piv[k]];
    for (std::size_t j = 0; j < k; ++j) t -= lq.at(j, k) * w[j];
    w[k] = t / lq.at(k, k);
  }
  Vector zp(s, 0.0);
  for (std::size_t k = 0; k < r; ++k) zp[k] = w[k];
  lq.apply_q(zp);

  for (std::size_t j = 0; j < s; ++j) z[qr.piv[j]] = zp[j];
  return z;
}

Matrix nullspace_basis(const Matrix& A, double rank_rel_tol) {
  const std::size_t n = A.cols();
  Cpqr qr;
  qr.factor(A.transposed(), rank_rel_tol);
  const std::size_t r = qr.rank;
  require(r < n, ErrorCode::TrivialNullSpace, "matrix has full column rank");
  Matrix N(n, n - r);
  Vector e(n);
  for (std::size_t j = 0; j < n - r; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[r + j] = 1.0;
    qr.apply_q(e);
    for (std::size_t i = 0; i < n; ++i) N(i, j) = e[i];
  }
  return N;
}

std::size_t matrix_rank(const Matrix& A, double rank_rel_tol) {
  Cpqr qr;
  if (A.rows() >= A.cols()) {
    qr.factor(A, rank_rel_tol);
  } else {
    qr.factor(A.transposed(), rank_rel_tol);
  }
  return qr.rank;
}

std::vector<double> symmetric_eigenvalues(const Matrix& S) {
  require(S.rows() == S.cols(), ErrorCode::DimensionMismatch, "eigen: not square");
  const std::size_t n = S.rows();
  Matrix A = S;
  const int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
    if (off < 1e-30 * (1.0 + std::abs(A(0, 0)))) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (A(p, q) == 0.0) continue;
        const double theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          const double aip = A(i, p), aiq = A(i, q);
          A(i, p) = c * aip - s * aiq;
          A(i, q) = s * aip + c * aiq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double api = A(p, i), aqi = A(q, i);
          A(p, i) = c * api - s * aqi;
          A(q, i) = s * api + c * aqi;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = A(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

}  // namespace hpq
