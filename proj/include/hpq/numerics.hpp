#pragma once

#include <cstddef>
#include <vector>

#include "hpq/linalg.hpp"
#include "hpq/surrogate.hpp"

namespace hpq {

/// x = F A^T (A F A^T + ridge I)^+ b. With ridge = 0 this minimizes
/// (1/2) x^T H x subject to A x = b over vectors supported where F > 0.
/// Throws SingularSystem when the Gram factorization collapses beyond the
/// ridge fallback. When `consistent` is non-null, an out-of-range b is
/// reported through it instead of throwing.
Vector weighted_minnorm_solve(const Matrix& A, const WeightDiagonal& f,
                              const Vector& b, double ridge,
                              bool* consistent = nullptr);

/// Least squares restricted to supp(x) within `support`; minimum-norm
/// minimizer when the support submatrix is rank deficient. Empty support
/// returns the zero vector.
Vector least_squares_on_support(const Matrix& A,
                                const std::vector<std::size_t>& support,
                                const Vector& b);

/// Equality-constrained l1 minimization by smoothed IRLS (weights
/// 1/(|x_i| + eps), eps swept 1e-1 down to 1e-8). Throws Infeasible when
/// no iterate reaches ||Ax - b|| <= tol * max(1, ||b||).
Vector l1_min_equality(const Matrix& A, const Vector& b, double tol);

}  // namespace hpq
