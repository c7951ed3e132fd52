#include "hpq/numerics.hpp"

#include <algorithm>
#include <cmath>

#include "hpq/error.hpp"

namespace hpq {

Vector weighted_minnorm_solve(const Matrix& A, const WeightDiagonal& f,
                              const Vector& b, double ridge, bool* consistent) {
  require(f.kind == WeightKind::F, ErrorCode::OutOfRange,
          "weighted_minnorm_solve expects F-kind weights");
  require(f.entries.size() == A.cols(), ErrorCode::DimensionMismatch,
          "weight length != columns");
  require(b.size() == A.rows(), ErrorCode::DimensionMismatch, "rhs length != rows");
  const std::size_t m = A.rows();

  Matrix G = gram_weighted(A, f.entries);
  if (ridge > 0.0) {
    for (std::size_t i = 0; i < m; ++i) G(i, i) += ridge;
  }
  const double ctol = 1e-8 * std::max(1.0, norm_inf(b));

  PsdCholesky chol;
  chol.factor(G);
  Vector y;
  bool ok = chol.solve(b, y, ctol);
  if (!ok) {
    // F entries span many orders of magnitude near convergence; retry with
    // a trace-scaled ridge before giving up.
    double trace = 0.0;
    for (std::size_t i = 0; i < m; ++i) trace += G(i, i);
    const double fallback = 1e-12 * trace / static_cast<double>(m);
    if (fallback > 0.0) {
      Matrix G2 = G;
      for (std::size_t i = 0; i < m; ++i) G2(i, i) += fallback;
      PsdCholesky chol2;
      chol2.factor(G2);
      ok = chol2.solve(b, y, ctol);
      if (ok || consistent) {
        Vector x = matvec_transposed(A, y);
        for (std::size_t j = 0; j < x.size(); ++j) x[j] *= f.entries[j];
        if (consistent) *consistent = ok;
        return x;
      }
    }
    if (consistent) {
      *consistent = false;
      Vector x = matvec_transposed(A, y);
      for (std::size_t j = 0; j < x.size(); ++j) x[j] *= f.entries[j];
      return x;
    }
    fail(ErrorCode::SingularSystem, "weighted gram system rank-deficient beyond recovery");
  }
  if (consistent) *consistent = true;
  Vector x = matvec_transposed(A, y);
  for (std::size_t j = 0; j < x.size(); ++j) x[j] *= f.entries[j];
  return x;
}

Vector least_squares_on_support(const Matrix& A,
                                const std::vector<std::size_t>& support,
                                const Vector& b) {
  require(b.size() == A.rows(), ErrorCode::DimensionMismatch, "rhs length != rows");
  Vector x(A.cols(), 0.0);
  if (support.empty()) return x;
  for (std::size_t j : support)
    require(j < A.cols(), ErrorCode::OutOfRange, "support index out of range");

  Matrix As = A.columns(support);
  Vector z = least_squares_minnorm(As, b);
  for (std::size_t j = 0; j < support.size(); ++j) x[support[j]] = z[j];
  return x;
}

Vector l1_min_equality(const Matrix& A, const Vector& b, double tol) {
  require(b.size() == A.rows(), ErrorCode::DimensionMismatch, "rhs length != rows");
  const std::size_t n = A.cols();
  const double bscale = std::max(1.0, norm2(b));

  if (norm2(b) == 0.0) return Vector(n, 0.0);

  // Start from the minimum 2-norm solution (unit weights).
  WeightDiagonal f{Vector(n, 1.0), WeightKind::F};
  bool consistent = true;
  Vector x = weighted_minnorm_solve(A, f, b, 0.0, &consistent);

  double xscale = std::max(1.0, norm_inf(x));
  for (double eps = 1e-1; eps >= 0.5e-8; eps *= 0.1) {
    for (int inner = 0; inner < 12; ++inner) {
      for (std::size_t j = 0; j < n; ++j) f.entries[j] = std::abs(x[j]) + eps * xscale;
      Vector xn = weighted_minnorm_solve(A, f, b, 0.0, &consistent);
      double change = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        change = std::max(change, std::abs(xn[j] - x[j]));
      x = std::move(xn);
      xscale = std::max(1.0, norm_inf(x));
      if (change <= 0.1 * eps * xscale) break;
    }
  }

  // The smoothed iteration stops a hair short of the vertex it identified;
  // refit on the dominant support and keep the refit when it does not
  // increase the objective.
  std::vector<std::size_t> order(n);
  for (std::size_t j = 0; j < n; ++j) order[j] = j;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) {
    return std::abs(x[a]) > std::abs(x[c]);
  });
  const double cutoff = 1e-6 * norm_inf(x);
  std::size_t dominant = 0;
  while (dominant < n && std::abs(x[order[dominant]]) > cutoff) ++dominant;
  for (std::size_t size : {dominant, std::min(n, A.rows())}) {
    if (size == 0 || size > A.rows()) continue;
    std::vector<std::size_t> S(order.begin(), order.begin() + size);
    Vector xs = least_squares_on_support(A, S, b);
    if (norm2(residual(A, xs, b)) <= tol * bscale && norm1(xs) <= norm1(x))
      x = std::move(xs);
  }

  // On tiny systems descend through basic solutions with add/drop/swap
  // support moves until no move improves; near-degenerate instances
  // otherwise leave the iteration one vertex short of the minimum.
  if (n <= 16) {
    const std::size_t cap = std::min(n, A.rows());
    std::vector<std::size_t> S(order.begin(),
                               order.begin() + static_cast<std::ptrdiff_t>(cap));
    std::sort(S.begin(), S.end());
    Vector xv = least_squares_on_support(A, S, b);
    if (norm2(residual(A, xv, b)) <= tol * bscale) {
      double value = norm1(xv);
      auto try_move = [&](std::vector<std::size_t> S2) {
        std::sort(S2.begin(), S2.end());
        Vector xs = least_squares_on_support(A, S2, b);
        if (norm2(residual(A, xs, b)) > tol * bscale) return false;
        const double v2 = norm1(xs);
        if (v2 >= value - 1e-12 * std::max(1.0, value)) return false;
        xv = std::move(xs);
        S = std::move(S2);
        value = v2;
        return true;
      };
      bool improved = true;
      for (int pass = 0; pass < 200 && improved; ++pass) {
        improved = false;
        for (std::size_t si = 0; si < S.size() && !improved; ++si) {
          std::vector<std::size_t> drop = S;
          drop.erase(drop.begin() + static_cast<std::ptrdiff_t>(si));
          improved = try_move(drop);
          for (std::size_t j2 = 0; j2 < n && !improved; ++j2) {
            if (std::find(S.begin(), S.end(), j2) != S.end()) continue;
            std::vector<std::size_t> swap2 = S;
            swap2[si] = j2;
            improved = try_move(std::move(swap2));
          }
        }
        if (!improved && S.size() < cap) {
          for (std::size_t j2 = 0; j2 < n && !improved; ++j2) {
            if (std::find(S.begin(), S.end(), j2) != S.end()) continue;
            std::vector<std::size_t> grow = S;
            grow.push_back(j2);
            improved = try_move(std::move(grow));
          }
        }
      }
      if (value <= norm1(x)) x = std::move(xv);
    }
  }

  if (norm2(residual(A, x, b)) > tol * bscale)
    fail(ErrorCode::Infeasible, "l1 initializer: no solution within tolerance");
  return x;
}

}  // namespace hpq
