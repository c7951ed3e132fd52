#pragma once

#include <cstddef>
#include <vector>

#include "hpq/linalg.hpp"
#include "hpq/surrogate.hpp"

namespace hpq {

struct SolverConfig {
  int max_iters = 200;
  double step_tol = 1e-8;     // relative iterate change
  double zero_tol = 1e-10;    // magnitude below which an entry is a hard zero
  double ridge = 0.0;
  double va_low = 0.2;        // Algorithm-2 magnitude gate
  double va_high = 1.2;
  double epsilon = 0.0;       // residual infinity-norm bound
  double eta = 1.5;           // box bound on |x_i|

  /// Defaults for the thresholded box-constrained solver (30 iterations).
  static SolverConfig constrained_defaults();

  void validate() const;
};

struct SolveResult {
  Vector x;
  std::vector<double> objective_trace;  // h-norm per iterate, initializer first
  int iterations = 0;
  bool converged = false;
  std::vector<std::size_t> support;     // indices with |x_i| > zero_tol
  double fixed_point_residual = 0.0;    // 2-norm change of one extra step
  bool residual_feasible = true;        // ||Ax - b||_inf <= epsilon (constrained)
  bool box_feasible = true;             // ||x||_inf <= eta (constrained)
};

/// Fixed-point IRLS for min ||x||_h s.t. Ax = b, started from the l1
/// minimizer. The iteration map is x <- F(x) A^T (A F(x) A^T)^+ b.
SolveResult solve_equality(const Matrix& A, const Vector& b,
                           const SurrogateParams& params, const SolverConfig& cfg);

/// Thresholded variant for the box/infinity-norm model: each pass does an
/// IRLS step, gates entries whose magnitude falls in [va_low, va_high],
/// then least-squares refits on that support; stops when the support
/// repeats. Infeasibility is reported through the result flags.
SolveResult solve_constrained(const Matrix& A, const Vector& b,
                              const SurrogateParams& params, const SolverConfig& cfg);

}  // namespace hpq
