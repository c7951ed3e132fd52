#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "hpq/linalg.hpp"
#include "hpq/surrogate.hpp"

namespace hpq {

enum class NormKind { HPQ, L1 };

/// Sampled lower bound on a null-space constant, with the witness vector
/// attaining it. Only a lower bound is claimed; `exact` marks the one case
/// (k = 1 on a one-dimensional null space) where the ratio cannot move.
struct NscEstimate {
  double value = 0.0;
  Vector witness;
  std::size_t k = 0;
  NormKind kind = NormKind::HPQ;
  std::size_t nullspace_dim = 0;
  bool exact = false;
  std::uint64_t seed = 0;
};

/// Mutual coherence: max over distinct column pairs of the normalized
/// absolute inner product. Throws ZeroColumn.
double coherence(const Matrix& A);

/// Largest k with guaranteed OMP recovery, floor((1 + 1/kappa)/2);
/// orthogonal columns (kappa = 0) report n as the unbounded sentinel.
std::size_t omp_guarantee_k(const Matrix& A);

/// Restricted isometry constant of order k by exhaustive support
/// enumeration; guarded to n <= 20 and C(n,k) <= 2e5 (TooLarge otherwise).
double rip_constant(const Matrix& A, std::size_t k);
double rip_constant_serial(const Matrix& A, std::size_t k);

/// Ratio ||x_S||/||x_{S^c}|| with S the k largest surrogate values of x;
/// the quantity nsc_estimate maximizes. Infinite when x lives on <= k
/// entries.
double nsc_ratio(const Vector& x, std::size_t k, NormKind kind,
                 const std::optional<SurrogateParams>& params);

/// Randomized lower bound on the null-space constant: orthonormal
/// null-space basis, seeded coefficient samples, coordinate-descent polish.
/// Deterministic per seed regardless of thread count.
NscEstimate nsc_estimate(const Matrix& A, std::size_t k, NormKind kind,
                         const std::optional<SurrogateParams>& params,
                         std::size_t n_samples, std::uint64_t seed);

/// 2(1 + rho)/(1 - rho); OutOfRange unless 0 <= rho < 1.
double stability_bound(double rho);

}  // namespace hpq
