#include <doctest.h>

#include <cmath>

#include "hpq/error.hpp"
#include "hpq/numerics.hpp"
#include "hpq/oracles.hpp"
#include "hpq/solver.hpp"
#include "hpq/tdoa.hpp"
#include "test_helpers.hpp"

using namespace hpq;
using namespace hpq::testing;

TEST_SUITE_BEGIN("solver");

TEST_CASE("fixture system recovers the sparse solution") {
  SurrogateParams params(0.01, 1.0);
  SolverConfig cfg;
  auto res = solve_equality(example_matrix(), example_rhs(), params, cfg);
  CHECK(res.converged);
  CHECK(max_abs_diff(res.x, {1.0, 0.0, 0.0}) <= 1e-6);
  CHECK(res.support == std::vector<std::size_t>{0});
  CHECK(res.fixed_point_residual <= 1e-6);
}

TEST_CASE("identity solves in one step") {
  SurrogateParams params(0.1, 1.0);
  SolverConfig cfg;
  Vector b{0.5, -2.0, 3.0};
  auto res = solve_equality(Matrix::identity(3), b, params, cfg);
  CHECK(res.iterations == 1);
  CHECK(res.converged);
  CHECK(max_abs_diff(res.x, b) <= 1e-10);
}

TEST_CASE("planted sparse recovery on random systems") {
  SurrogateParams params(0.01, 1.0);
  SolverConfig cfg;
  int recovered = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Rng rng(1000 + trial);
    Matrix A = random_gaussian(20, 40, rng);
    Vector x0 = planted_sparse(40, 3, rng);
    Vector b = matvec(A, x0);
    auto res = solve_equality(A, b, params, cfg);
    if (max_abs_diff(res.x, x0) <= 1e-4) ++recovered;
  }
  CHECK(recovered >= 95);
}

TEST_CASE("descent, quadratic optimality and support monotonicity") {
  // Re-run the iteration through the public primitives so the per-step
  // inequalities are visible.
  SurrogateParams params(0.05, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    Rng rng(300 + trial);
    Matrix A = random_gaussian(8, 16, rng);
    Vector x0 = planted_sparse(16, 3, rng);
    Vector b = matvec(A, x0);

    Vector x = l1_min_equality(A, b, 1e-8);
    double prev_obj = h_norm(x, params);
    for (int k = 0; k < 60; ++k) {
      auto [H, F] = weight_diagonals(x, params, 1e-10);
      Vector xn = weighted_minnorm_solve(A, F, b, 0.0);
      // Quadratic subproblem optimality at the current weights.
      double qn = 0.0, qp = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        qn += xn[i] * H.entries[i] * xn[i];
        qp += x[i] * H.entries[i] * x[i];
      }
      CHECK(qn <= qp + 1e-10 * std::max(1.0, qp));
      // Hard zeros stay zero.
      for (std::size_t i = 0; i < x.size(); ++i)
        if (F.entries[i] == 0.0) CHECK(xn[i] == 0.0);
      const double obj = h_norm(xn, params);
      CHECK(obj <= prev_obj + 1e-10);
      prev_obj = obj;
      x = std::move(xn);
    }
  }
}

TEST_CASE("result invariants on random systems") {
  SurrogateParams params(0.01, 1.0);
  SolverConfig cfg;
  for (int trial = 0; trial < 20; ++trial) {
    Rng rng(500 + trial);
    Matrix A = random_gaussian(10, 20, rng);
    Vector x0 = planted_sparse(20, 3, rng);
    Vector b = matvec(A, x0);
    auto res = solve_equality(A, b, params, cfg);

    for (std::size_t k = 1; k < res.objective_trace.size(); ++k)
      CHECK(res.objective_trace[k] <= res.objective_trace[k - 1] + 1e-10);
    CHECK(norm2(residual(A, res.x, b)) <= 1e-8 * std::max(1.0, norm2(b)));
    CHECK(res.fixed_point_residual <= 1e-6 * std::max(1.0, norm2(res.x)));
    // Converged support submatrix has full column rank.
    if (!res.support.empty())
      CHECK(matrix_rank(A.columns(res.support)) == res.support.size());
  }
}

TEST_CASE("p-sweep matches the l0 oracle on most tiny instances") {
  SolverConfig cfg;
  int agree = 0;
  const int trials = 25;
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(700 + trial);
    Matrix A = random_gaussian(6, 12, rng);
    Vector x0 = planted_sparse(12, 1 + rng.integer(2), rng);
    Vector b = matvec(A, x0);
    auto cert = brute_force_l0(A, b, 1e-8);
    bool matched = false;
    for (double p : {1e-1, 1e-2, 1e-3, 1e-4}) {
      auto res = solve_equality(A, b, SurrogateParams(p, 1.0), cfg);
      for (const auto& sol : cert.solutions) {
        std::vector<std::size_t> s0;
        for (std::size_t i = 0; i < sol.size(); ++i)
          if (std::abs(sol[i]) > 1e-8) s0.push_back(i);
        if (s0 == res.support) matched = true;
      }
      if (matched) break;
    }
    if (matched) ++agree;
  }
  CHECK(agree >= 23);  // >= 95% of 25 seeded instances
}

TEST_CASE("constrained solve basics") {
  SurrogateParams params(0.1, 1.0);

  SUBCASE("zero rhs is immediately feasible") {
    SolverConfig cfg = SolverConfig::constrained_defaults();
    cfg.epsilon = 0.5;
    auto res = solve_constrained(example_matrix(), {0.0, 0.0}, params, cfg);
    CHECK(res.converged);
    CHECK(norm2(res.x) == 0.0);
    CHECK(res.residual_feasible);
    CHECK(res.box_feasible);
  }

  SUBCASE("planted indicator recovered on a gaussian system") {
    Rng rng(801);
    Matrix A = random_gaussian(8, 20, rng);
    Vector x0(20, 0.0);
    x0[3] = 1.0;
    x0[11] = 1.0;
    Vector b = matvec(A, x0);
    SolverConfig cfg = SolverConfig::constrained_defaults();
    cfg.epsilon = 1e-8;
    auto res = solve_constrained(A, b, params, cfg);
    CHECK(res.support == std::vector<std::size_t>{3, 11});
    CHECK(res.residual_feasible);
    CHECK(max_abs_diff(res.x, x0) <= 1e-6);
  }

  SUBCASE("on-grid moment system returns the indicator") {
    // 3x3 grid, three receivers, two on-grid targets.
    Grid grid = make_grid({0.0, 0.0}, {1000.0, 1000.0}, 3, 3);
    std::vector<Point2> receivers{{10.0, 20.0}, {950.0, 40.0}, {500.0, 990.0}};
    TdoaScene scene;
    scene.receivers = receivers;
    scene.targets = {grid.points[2], grid.points[7]};
    scene.c = 3e8;
    DelayTable L = true_delays(scene);
    SparseSystem sys = build_system(grid, receivers, L, 2, scene.c);
    SolverConfig cfg = SolverConfig::constrained_defaults();
    cfg.epsilon = 1e-9;
    auto res = solve_constrained(sys.A, sys.b, params, cfg);
    Vector expect(9, 0.0);
    expect[2] = 1.0;
    expect[7] = 1.0;
    CHECK(max_abs_diff(res.x, expect) <= 1e-4);
    CHECK(res.residual_feasible);
    CHECK(res.box_feasible);
  }

  SUBCASE("empty magnitude gate raises EmptySupport") {
    // Single equation; the l1 iterate lands far outside the gate.
    Matrix A = Matrix::from_rows({{1.0, 2.0, 10.0}});
    Vector b{20.0};
    SolverConfig cfg = SolverConfig::constrained_defaults();
    cfg.epsilon = 1e-6;
    CHECK_THROWS_AS(solve_constrained(A, b, params, cfg), Error);
  }
}

TEST_SUITE_END();
