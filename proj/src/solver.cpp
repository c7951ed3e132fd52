#include "hpq/solver.hpp"

#include <algorithm>
#include <cmath>

#include "hpq/error.hpp"
#include "hpq/numerics.hpp"

namespace hpq {

SolverConfig SolverConfig::constrained_defaults() {
  SolverConfig cfg;
  cfg.max_iters = 30;
  return cfg;
}

void SolverConfig::validate() const {
  require(max_iters >= 1, ErrorCode::OutOfRange, "solver: max_iters must be >= 1");
  require(step_tol > 0.0, ErrorCode::OutOfRange, "solver: step_tol must be > 0");
  require(zero_tol >= 0.0, ErrorCode::OutOfRange, "solver: zero_tol must be >= 0");
  require(ridge >= 0.0, ErrorCode::OutOfRange, "solver: ridge must be >= 0");
  require(va_low < va_high, ErrorCode::OutOfRange, "solver: need va_low < va_high");
  require(epsilon >= 0.0, ErrorCode::OutOfRange, "solver: epsilon must be >= 0");
  require(eta > 1.0, ErrorCode::OutOfRange, "solver: eta must be > 1");
}

namespace {

std::vector<std::size_t> support_of(const Vector& x, double zero_tol) {
  std::vector<std::size_t> s;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (std::abs(x[i]) > zero_tol) s.push_back(i);
  return s;
}

double relative_change(const Vector& a, const Vector& b) {
  double change = 0.0, scale = 1.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    change = std::max(change, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(a[i]));
  }
  return change / scale;
}

}  // namespace

SolveResult solve_equality(const Matrix& A, const Vector& b,
                           const SurrogateParams& params, const SolverConfig& cfg) {
  cfg.validate();
  SolveResult res;
  res.x = l1_min_equality(A, b, 1e-8);
  res.objective_trace.push_back(h_norm(res.x, params));

  for (int k = 1; k <= cfg.max_iters; ++k) {
    auto [H, F] = weight_diagonals(res.x, params, cfg.zero_tol);
    Vector xn = weighted_minnorm_solve(A, F, b, cfg.ridge);
    const double rel = relative_change(xn, res.x);
    res.x = std::move(xn);
    res.objective_trace.push_back(h_norm(res.x, params));
    res.iterations = k;
    if (rel <= cfg.step_tol) {
      res.converged = true;
      break;
    }
  }

  // One more application of the map measures how close the iterate is to
  // the fixed-point equation.
  {
    auto [H, F] = weight_diagonals(res.x, params, cfg.zero_tol);
    Vector xfp = weighted_minnorm_solve(A, F, b, cfg.ridge);
    double d2 = 0.0;
    for (std::size_t i = 0; i < xfp.size(); ++i) {
      const double d = xfp[i] - res.x[i];
      d2 += d * d;
    }
    res.fixed_point_residual = std::sqrt(d2);
  }
  res.support = support_of(res.x, cfg.zero_tol);
  return res;
}

SolveResult solve_constrained(const Matrix& A, const Vector& b,
                              const SurrogateParams& params, const SolverConfig& cfg) {
  cfg.validate();
  SolveResult res;

  if (norm_inf(b) <= cfg.epsilon) {
    // Zero is feasible and has minimal objective.
    res.x.assign(A.cols(), 0.0);
    res.objective_trace.push_back(0.0);
    res.converged = true;
    return res;
  }

  try {
    res.x = l1_min_equality(A, b, 1e-8);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Infeasible) throw;
    res.x = least_squares_minnorm(A, b);
  }
  res.objective_trace.push_back(h_norm(res.x, params));

  std::vector<std::size_t> prev_support;
  bool have_prev = false;
  Vector prev_x = res.x;

  for (int k = 1; k <= cfg.max_iters; ++k) {
    auto [H, F] = weight_diagonals(res.x, params, cfg.zero_tol);
    bool consistent = true;
    Vector x_half = weighted_minnorm_solve(A, F, b, cfg.ridge, &consistent);

    std::vector<std::size_t> gate;
    for (std::size_t i = 0; i < x_half.size(); ++i) {
      const double mag = std::abs(x_half[i]);
      if (mag >= cfg.va_low && mag <= cfg.va_high) gate.push_back(i);
    }
    if (gate.empty()) {
      if (norm_inf(b) > cfg.epsilon)
        fail(ErrorCode::EmptySupport,
             "constrained solve: magnitude gate emptied the support while the "
             "residual exceeds epsilon");
      res.x.assign(A.cols(), 0.0);
      res.converged = true;
      res.iterations = k;
      break;
    }

    prev_x = res.x;
    res.x = least_squares_on_support(A, gate, b);
    res.objective_trace.push_back(h_norm(res.x, params));
    res.iterations = k;

    if (have_prev && gate == prev_support) {
      res.converged = true;
      break;
    }
    prev_support = std::move(gate);
    have_prev = true;
  }

  {
    double d2 = 0.0;
    for (std::size_t i = 0; i < res.x.size(); ++i) {
      const double d = res.x[i] - prev_x[i];
      d2 += d * d;
    }
    res.fixed_point_residual = std::sqrt(d2);
  }
  res.support = support_of(res.x, cfg.zero_tol);
  res.residual_feasible = norm_inf(residual(A, res.x, b)) <= cfg.epsilon;
  res.box_feasible = norm_inf(res.x) <= cfg.eta;
  return res;
}

}  // namespace hpq
