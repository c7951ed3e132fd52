#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hpq/linalg.hpp"

namespace hpq {

/// Output of the exhaustive l0 search: every minimizer found at the first
/// feasible support size.
struct L0Certificate {
  std::vector<Vector> solutions;
  std::size_t sparsity = 0;
  std::uint64_t supports_tested = 0;
};

/// Exhaustive minimum-support solve of Ax = b: supports are enumerated in
/// order of increasing size and a support is accepted when its least
/// squares residual is <= tol * max(1, ||b||). Guarded by max_n columns.
/// Deliberately self-contained (its own elimination-based least squares)
/// so it stays an independent reference for the iterative solvers.
L0Certificate brute_force_l0(const Matrix& A, const Vector& b, double tol,
                             std::size_t max_n = 16);
L0Certificate brute_force_l0_serial(const Matrix& A, const Vector& b, double tol,
                                    std::size_t max_n = 16);

/// (sum v_i, sum v_i^2, ..., sum v_i^count).
Vector power_sums(const Vector& v, std::size_t count);

/// Recovers the multiset behind n power sums: Newton's identities give the
/// elementary symmetric polynomials, the monic polynomial is rooted, and
/// the roots come back sorted nonincreasing. Throws NonRealRoots when the
/// input is not the power-sum vector of a real multiset.
Vector multiset_from_power_sums(const Vector& w);

}  // namespace hpq
