#include <doctest.h>

#include <cmath>

#include "hpq/error.hpp"
#include "hpq/numerics.hpp"
#include "test_helpers.hpp"

using namespace hpq;
using namespace hpq::testing;

namespace {

WeightDiagonal f_weights(Vector entries) {
  return WeightDiagonal{std::move(entries), WeightKind::F};
}

}  // namespace

TEST_SUITE_BEGIN("numerics");

TEST_CASE("weighted_minnorm_solve fixture cases") {
  Matrix A = example_matrix();
  Vector b = example_rhs();

  SUBCASE("uniform weights give the least-norm solution") {
    Vector x = weighted_minnorm_solve(A, f_weights({1.0, 1.0, 1.0}), b, 0.0);
    CHECK(x[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(x[1] == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
    CHECK(x[2] == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("support forced to the first column") {
    Vector x = weighted_minnorm_solve(A, f_weights({1.0, 0.0, 0.0}), b, 0.0);
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(x[1] == 0.0);
    CHECK(x[2] == 0.0);
  }
  SUBCASE("identity constraint determines x") {
    Matrix I = Matrix::identity(3);
    Vector rhs{0.3, -1.0, 2.0};
    Vector x = weighted_minnorm_solve(I, f_weights({2.0, 0.5, 9.0}), rhs, 0.0);
    CHECK(max_abs_diff(x, rhs) <= 1e-12);
  }
}

TEST_CASE("weighted_minnorm_solve equals the pseudo-inverse route") {
  Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    Matrix A = random_gaussian(5, 10, rng);
    Vector b(5);
    for (double& v : b) v = rng.normal();
    Vector x = weighted_minnorm_solve(A, f_weights(Vector(10, 1.0)), b, 0.0);
    // Independent route: normal-equations solve of (A A^T) y = b.
    Matrix G = gram_weighted_serial(A, Vector(10, 1.0));
    PsdCholesky chol;
    chol.factor(G);
    Vector y;
    REQUIRE(chol.solve(b, y, 1e-8));
    Vector ref = matvec_transposed(A, y);
    CHECK(max_abs_diff(x, ref) <= 1e-8);
    // Feasibility on a full-row-rank system.
    CHECK(norm2(residual(A, x, b)) <= 1e-8 * std::max(1.0, norm2(b)));
  }
}

TEST_CASE("least_squares_on_support") {
  Matrix A = example_matrix();
  Vector b = example_rhs();

  SUBCASE("fixture support") {
    Vector x = least_squares_on_support(A, {0}, b);
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(x[1] == 0.0);
    CHECK(x[2] == 0.0);
    CHECK(norm2(residual(A, x, b)) <= 1e-12);
  }
  SUBCASE("empty support") {
    Vector x = least_squares_on_support(A, {}, b);
    CHECK(norm2(x) == 0.0);
  }
  SUBCASE("full support on a square system") {
    Matrix S = Matrix::from_rows({{2.0, 1.0}, {1.0, 3.0}});
    Vector x = least_squares_on_support(S, {0, 1}, {3.0, 4.0});
    CHECK(max_abs_diff(x, {1.0, 1.0}) <= 1e-12);
  }
  SUBCASE("residual orthogonal to the support columns") {
    Rng rng(41);
    for (int trial = 0; trial < 25; ++trial) {
      Matrix A2 = random_gaussian(8, 12, rng);
      Vector b2(8);
      for (double& v : b2) v = rng.normal();
      std::vector<std::size_t> S{1, 4, 7, 9};
      Vector x = least_squares_on_support(A2, S, b2);
      Vector r = residual(A2, x, b2);
      for (std::size_t j : S) CHECK(std::abs(dot(A2.column(j), r)) <= 1e-8);
      for (std::size_t j = 0; j < 12; ++j) {
        const bool in_support =
            std::find(S.begin(), S.end(), j) != S.end();
        if (!in_support) CHECK(x[j] == 0.0);
      }
    }
  }
}

TEST_CASE("l1_min_equality") {
  SUBCASE("fixture minimizer") {
    Vector x = l1_min_equality(example_matrix(), example_rhs(), 1e-8);
    CHECK(std::abs(x[0] - 1.0) <= 1e-6);
    CHECK(std::abs(x[1]) <= 1e-6);
    CHECK(std::abs(x[2]) <= 1e-6);
    CHECK(norm1(x) == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("identity returns b") {
    Vector b{1.0, -2.0, 0.0, 4.0};
    Vector x = l1_min_equality(Matrix::identity(4), b, 1e-8);
    CHECK(max_abs_diff(x, b) <= 1e-9);
  }
  SUBCASE("zero rhs") {
    Vector x = l1_min_equality(example_matrix(), {0.0, 0.0}, 1e-8);
    CHECK(norm2(x) == 0.0);
  }
  SUBCASE("infeasible system") {
    Matrix A = Matrix::from_rows({{1.0, 1.0}, {1.0, 1.0}});
    CHECK_THROWS_AS(l1_min_equality(A, {1.0, 2.0}, 1e-8), Error);
  }
  SUBCASE("never worse than the vertex enumeration oracle") {
    Rng rng(51);
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t m = 4, n = 9;
      Matrix A = random_gaussian(m, n, rng);
      Vector x0 = planted_sparse(n, 2, rng);
      Vector b = matvec(A, x0);
      Vector x = l1_min_equality(A, b, 1e-8);
      const double best = l1_vertex_minimum(A, b);
      CHECK(norm1(x) <= best + 1e-6);
      CHECK(norm2(residual(A, x, b)) <= 1e-8 * std::max(1.0, norm2(b)));
    }
  }
}

TEST_SUITE_END();
