#include "hpq/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "hpq/combinatorics.hpp"
#include "hpq/error.hpp"

namespace hpq {

namespace {

// Least squares on a support via normal equations and Gaussian elimination
// with partial pivoting. Returns false when A_S is rank deficient (such
// supports cannot carry a minimal-size solution: a kernel vector inside the
// support would let us zero one more entry).
bool support_least_squares(const Matrix& A, const std::vector<std::size_t>& S,
                           const Vector& b, Vector& coeffs) {
  const std::size_t s = S.size();
  std::vector<double> N(s * s, 0.0);
  coeffs.assign(s, 0.0);
  double max_diag = 0.0;
  for (std::size_t a = 0; a < s; ++a) {
    for (std::size_t c = a; c < s; ++c) {
      double v = 0.0;
      for (std::size_t i = 0; i < A.rows(); ++i) v += A(i, S[a]) * A(i, S[c]);
      N[a * s + c] = N[c * s + a] = v;
    }
    max_diag = std::max(max_diag, N[a * s + a]);
    double rhs = 0.0;
    for (std::size_t i = 0; i < A.rows(); ++i) rhs += A(i, S[a]) * b[i];
    coeffs[a] = rhs;
  }
  const double pivot_tol = 1e-10 * std::max(max_diag, 1e-300);
  for (std::size_t k = 0; k < s; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < s; ++i)
      if (std::abs(N[i * s + k]) > std::abs(N[p * s + k])) p = i;
    if (std::abs(N[p * s + k]) <= pivot_tol) return false;
    if (p != k) {
      for (std::size_t j = 0; j < s; ++j) std::swap(N[k * s + j], N[p * s + j]);
      std::swap(coeffs[k], coeffs[p]);
    }
    for (std::size_t i = k + 1; i < s; ++i) {
      const double factor = N[i * s + k] / N[k * s + k];
      for (std::size_t j = k; j < s; ++j) N[i * s + j] -= factor * N[k * s + j];
      coeffs[i] -= factor * coeffs[k];
    }
  }
  for (std::size_t k = s; k-- > 0;) {
    double v = coeffs[k];
    for (std::size_t j = k + 1; j < s; ++j) v -= N[k * s + j] * coeffs[j];
    coeffs[k] = v / N[k * s + k];
  }
  return true;
}

double support_residual(const Matrix& A, const std::vector<std::size_t>& S,
                        const Vector& coeffs, const Vector& b) {
  double r2 = 0.0;
  for (std::size_t i = 0; i < A.rows(); ++i) {
    double v = -b[i];
    for (std::size_t a = 0; a < S.size(); ++a) v += A(i, S[a]) * coeffs[a];
    r2 += v * v;
  }
  return std::sqrt(r2);
}

L0Certificate brute_force_l0_impl(const Matrix& A, const Vector& b, double tol,
                                  std::size_t max_n, bool parallel) {
  const std::size_t n = A.cols();
  require(n <= max_n, ErrorCode::TooLarge, "brute_force_l0: too many columns");
  require(b.size() == A.rows(), ErrorCode::DimensionMismatch, "rhs length != rows");

  const double accept = tol * std::max(1.0, norm2(b));
  L0Certificate cert;

  if (norm2(b) <= accept) {
    cert.solutions.push_back(Vector(n, 0.0));
    cert.sparsity = 0;
    cert.supports_tested = 1;
    return cert;
  }
  cert.supports_tested = 1;  // the empty support

  for (std::size_t size = 1; size <= n; ++size) {
    const std::uint64_t count = binomial(n, size);
    std::vector<char> feasible(count, 0);
    std::vector<Vector> sols(count);
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
    for (std::uint64_t r = 0; r < count; ++r) {
      const auto S = unrank_combination(n, size, r);
      Vector coeffs;
      if (!support_least_squares(A, S, b, coeffs)) continue;
      if (support_residual(A, S, coeffs, b) <= accept) {
        Vector x(n, 0.0);
        for (std::size_t a = 0; a < size; ++a) x[S[a]] = coeffs[a];
        feasible[r] = 1;
        sols[r] = std::move(x);
      }
    }
    cert.supports_tested += count;
    for (std::uint64_t r = 0; r < count; ++r) {
      if (feasible[r]) cert.solutions.push_back(std::move(sols[r]));
    }
    if (!cert.solutions.empty()) {
      cert.sparsity = size;
      return cert;
    }
  }
  fail(ErrorCode::Infeasible, "brute_force_l0: system has no solution");
}

}  // namespace

L0Certificate brute_force_l0(const Matrix& A, const Vector& b, double tol,
                             std::size_t max_n) {
  return brute_force_l0_impl(A, b, tol, max_n, true);
}

L0Certificate brute_force_l0_serial(const Matrix& A, const Vector& b, double tol,
                                    std::size_t max_n) {
  return brute_force_l0_impl(A, b, tol, max_n, false);
}

Vector power_sums(const Vector& v, std::size_t count) {
  require(count >= 1, ErrorCode::OutOfRange, "power_sums: count must be >= 1");
  Vector w(count, 0.0);
  for (double x : v) {
    double pw = 1.0;
    for (std::size_t k = 0; k < count; ++k) {
      pw *= x;
      w[k] += pw;
    }
  }
  return w;
}

namespace {

using Complex = std::complex<double>;

// Durand-Kerner on a monic polynomial given by coefficients
// c[0] z^{n-1} + ... + c[n-1] added to z^n.
std::vector<Complex> polynomial_roots(const std::vector<double>& c) {
  const std::size_t n = c.size();
  double radius = 0.0;
  for (double v : c) radius = std::max(radius, std::abs(v));
  radius = 1.0 + radius;

  auto eval = [&](Complex z) {
    Complex acc(1.0, 0.0);
    for (double coeff : c) acc = acc * z + coeff;
    return acc;
  };

  std::vector<Complex> roots(n);
  Complex seed(0.4, 0.9);
  Complex w(1.0, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    w *= seed;
    roots[i] = radius * w;
  }
  for (int iter = 0; iter < 600; ++iter) {
    double max_step = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      Complex denom(1.0, 0.0);
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) denom *= roots[i] - roots[j];
      if (denom == Complex(0.0, 0.0)) denom = Complex(1e-30, 0.0);
      const Complex step = eval(roots[i]) / denom;
      roots[i] -= step;
      max_step = std::max(max_step, std::abs(step));
    }
    if (max_step < 1e-14 * radius) break;
  }
  return roots;
}

// Merge roots whose mutual distance is below `radius`; each cluster
// becomes one real candidate value with a multiplicity.
struct ClusterSet {
  std::vector<double> values;
  std::vector<std::size_t> mult;
};

ClusterSet cluster_roots(const std::vector<Complex>& roots, double radius) {
  const std::size_t n = roots.size();
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(roots[i] - roots[j]) <= radius) parent[find(i)] = find(j);

  std::vector<Complex> sum(n, Complex(0, 0));
  std::vector<std::size_t> cnt(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    sum[r] += roots[i];
    cnt[r] += 1;
  }
  ClusterSet cs;
  for (std::size_t i = 0; i < n; ++i) {
    if (find(i) != i) continue;
    cs.values.push_back((sum[i] / static_cast<double>(cnt[i])).real());
    cs.mult.push_back(cnt[i]);
  }
  return cs;
}

// Gauss-Newton on the power-sum equations sum_j mult_j c_j^k = w_k over the
// distinct real cluster values. Multiple roots are only first-order
// conditioned through the polynomial, but through the multiplicity-aware
// power-sum system they are fully determined; a few steps recover them to
// machine precision. Returns false when the normal equations collapse.
bool polish_clusters(ClusterSet& cs, const Vector& w) {
  const std::size_t d = cs.values.size();
  const std::size_t n = w.size();
  for (int iter = 0; iter < 40; ++iter) {
    // Residual and Jacobian of F_k(c) = sum_j m_j c_j^k - w_k.
    std::vector<double> F(n, 0.0), J(n * d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
      double pw = 1.0;
      for (std::size_t k = 0; k < n; ++k) {
        J[k * d + j] = static_cast<double>(k + 1) *
                       static_cast<double>(cs.mult[j]) * pw;
        pw *= cs.values[j];
        F[k] += static_cast<double>(cs.mult[j]) * pw;
      }
    }
    for (std::size_t k = 0; k < n; ++k) F[k] -= w[k];

    std::vector<double> N(d * d, 0.0), g(d, 0.0);
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t c = 0; c < d; ++c)
        for (std::size_t k = 0; k < n; ++k) N[a * d + c] += J[k * d + a] * J[k * d + c];
      for (std::size_t k = 0; k < n; ++k) g[a] += J[k * d + a] * F[k];
    }
    // Gaussian elimination with partial pivoting on the normal equations.
    for (std::size_t k = 0; k < d; ++k) {
      std::size_t p = k;
      for (std::size_t i = k + 1; i < d; ++i)
        if (std::abs(N[i * d + k]) > std::abs(N[p * d + k])) p = i;
      if (std::abs(N[p * d + k]) < 1e-300) return false;
      if (p != k) {
        for (std::size_t j = 0; j < d; ++j) std::swap(N[k * d + j], N[p * d + j]);
        std::swap(g[k], g[p]);
      }
      for (std::size_t i = k + 1; i < d; ++i) {
        const double f = N[i * d + k] / N[k * d + k];
        for (std::size_t j = k; j < d; ++j) N[i * d + j] -= f * N[k * d + j];
        g[i] -= f * g[k];
      }
    }
    std::vector<double> delta(d, 0.0);
    for (std::size_t k = d; k-- > 0;) {
      double v = g[k];
      for (std::size_t j = k + 1; j < d; ++j) v -= N[k * d + j] * delta[j];
      delta[k] = v / N[k * d + k];
    }
    double step = 0.0, scale = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      cs.values[j] -= delta[j];
      step = std::max(step, std::abs(delta[j]));
      scale = std::max(scale, std::abs(cs.values[j]));
    }
    if (!std::isfinite(step)) return false;
    if (step <= 1e-15 * scale) break;
  }
  return true;
}

}  // namespace

Vector multiset_from_power_sums(const Vector& w) {
  const std::size_t n = w.size();
  require(n >= 1, ErrorCode::OutOfRange, "multiset_from_power_sums: empty input");
  for (double v : w)
    require(std::isfinite(v), ErrorCode::OutOfRange, "power sums must be finite");

  // Newton recurrence: k e_k = sum_{i=1..k} (-1)^{i-1} e_{k-i} p_i.
  Vector e(n + 1, 0.0);
  e[0] = 1.0;
  for (std::size_t k = 1; k <= n; ++k) {
    double acc = 0.0;
    double sign = 1.0;
    for (std::size_t i = 1; i <= k; ++i) {
      acc += sign * e[k - i] * w[i - 1];
      sign = -sign;
    }
    e[k] = acc / static_cast<double>(k);
  }
  // Monic polynomial prod (z - z_i) = z^n - e1 z^{n-1} + e2 z^{n-2} - ...
  std::vector<double> coeff(n);
  double sign = -1.0;
  for (std::size_t k = 1; k <= n; ++k) {
    coeff[k - 1] = sign * e[k];
    sign = -sign;
  }

  const auto raw = polynomial_roots(coeff);
  double radius = 0.0;
  for (const auto& z : raw) radius = std::max(radius, std::abs(z));
  const double scale = std::max(1.0, radius);

  // Multiple roots scatter the iteration by ~eps^(1/multiplicity). Walk a
  // ladder of clustering radii; at each rung take the real cluster means as
  // a candidate multiset, polish it against the power-sum equations, and
  // accept the first candidate that reproduces the input. A genuinely
  // complex root set leaves every rung with a large residual.
  const double ladder[] = {0.0,  1e-12, 1e-10, 1e-8, 1e-6,
                           1e-4, 1e-3,  1e-2,  5e-2};
  double wscale = 1.0;
  for (std::size_t k = 0; k < n; ++k)
    wscale = std::max(wscale, std::abs(w[k]));
  for (double rel : ladder) {
    ClusterSet cs = cluster_roots(raw, rel * scale);
    if (!polish_clusters(cs, w)) continue;
    Vector candidate;
    for (std::size_t j = 0; j < cs.values.size(); ++j)
      candidate.insert(candidate.end(), cs.mult[j], cs.values[j]);
    if (!all_finite(candidate)) continue;
    const Vector check = power_sums(candidate, n);
    double err = 0.0;
    for (std::size_t k = 0; k < n; ++k) err += std::abs(check[k] - w[k]);
    if (std::isfinite(err) && err <= 1e-7 * wscale) {
      std::sort(candidate.begin(), candidate.end(), std::greater<double>());
      return candidate;
    }
  }
  fail(ErrorCode::NonRealRoots,
       "multiset_from_power_sums: input is not the power-sum vector of a real multiset");
}

}  // namespace hpq
