#include <doctest.h>

#include <cmath>

#include "hpq/error.hpp"
#include "hpq/rng.hpp"
#include "hpq/surrogate.hpp"

using namespace hpq;

TEST_SUITE_BEGIN("surrogate");

TEST_CASE("params validate") {
  CHECK_THROWS_AS(SurrogateParams(0.0, 1.0), Error);
  CHECK_THROWS_AS(SurrogateParams(-0.1, 1.0), Error);
  CHECK_THROWS_AS(SurrogateParams(0.1, 0.0), Error);
  CHECK_THROWS_AS(SurrogateParams(0.1, 1.5), Error);
  CHECK_NOTHROW(SurrogateParams(0.1, 1.0));
  CHECK_NOTHROW(SurrogateParams(1e-9, 0.3));
}

TEST_CASE("h_value basics") {
  SurrogateParams p(0.1, 1.0);
  CHECK(h_value(0.0, p) == 0.0);
  CHECK(h_value(1.0, p) == doctest::Approx(std::log(11.0)).epsilon(1e-12));
  CHECK(h_value(-1.0, p) == h_value(1.0, p));
  CHECK(h_value(2.0, p) > h_value(1.0, p));

  SurrogateParams tiny(1e-6, 1.0);
  CHECK(h_value(1.0, tiny) / std::log(1.0 + 1e6) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("h_norm basics") {
  SurrogateParams p(0.1, 1.0);
  CHECK(h_norm({0.0, 0.0, 0.0}, p) == 0.0);
  CHECK(h_norm({1.0, 0.0, 0.0}, p) == doctest::Approx(std::log(11.0)).epsilon(1e-12));
  const double t = 0.37;
  CHECK(h_norm({t, t, t}, p) == doctest::Approx(3.0 * h_value(t, p)).epsilon(1e-12));
  // Sign and permutation invariance.
  CHECK(h_norm({1.0, -2.0, 0.5}, p) == doctest::Approx(h_norm({0.5, 2.0, -1.0}, p)));
}

TEST_CASE("weight diagonals") {
  SurrogateParams p(0.1, 1.0);
  auto [H, F] = weight_diagonals({1.0, 0.0, 2.0}, p, 1e-10);
  CHECK(H.kind == WeightKind::H);
  CHECK(F.kind == WeightKind::F);
  CHECK(H.entries[0] == doctest::Approx(1.0 / 1.1).epsilon(1e-12));
  CHECK(F.entries[0] == doctest::Approx(1.1).epsilon(1e-12));
  CHECK(H.entries[1] == 0.0);
  CHECK(F.entries[1] == 0.0);

  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    SurrogateParams params(std::pow(10.0, rng.uniform(-4, 0)), rng.uniform(0.2, 1.0));
    Vector v(5);
    for (double& x : v) x = rng.normal();
    auto [h, f] = weight_diagonals(v, params, 1e-10);
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (std::abs(v[i]) <= 1e-10) {
        CHECK(h.entries[i] == 0.0);
        CHECK(f.entries[i] == 0.0);
      } else {
        CHECK(h.entries[i] * f.entries[i] == doctest::Approx(1.0).epsilon(1e-12));
        // H is h'(x)/x on the support.
        CHECK(h.entries[i] ==
              doctest::Approx(h_derivative(std::abs(v[i]), params) / std::abs(v[i]))
                  .epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("rearrangement") {
  CHECK(rearrangement({-3.0, 1.0, 2.0}) == Vector{3.0, 2.0, 1.0});
  CHECK(rearrangement({0.0, 0.0}) == Vector{0.0, 0.0});
  Rng rng(11);
  Vector v(8);
  for (double& x : v) x = rng.normal();
  Vector w = v;
  rng.shuffle(w);
  CHECK(rearrangement(v) == rearrangement(w));
}

TEST_CASE("subadditivity") {
  Rng rng(21);
  for (int trial = 0; trial < 500; ++trial) {
    SurrogateParams params(std::pow(10.0, rng.uniform(-4, 1)), rng.uniform(0.1, 1.0));
    const double x = 3.0 * rng.uniform01();
    const double y = 3.0 * rng.uniform01();
    CHECK(h_value(x + y, params) <= h_value(x, params) + h_value(y, params) + 1e-12);
  }
}

TEST_CASE("quadratic majorization") {
  Rng rng(22);
  for (int trial = 0; trial < 500; ++trial) {
    SurrogateParams params(std::pow(10.0, rng.uniform(-3, 0)), rng.uniform(0.2, 1.0));
    const double alpha = 0.01 + 3.0 * rng.uniform01();
    const double x = 4.0 * rng.uniform01();
    const double hd = h_derivative(alpha, params);
    const double lhs = h_value(x, params) - hd / (2.0 * alpha) * x * x;
    const double rhs = h_value(alpha, params) - alpha * hd / 2.0;
    CHECK(lhs <= rhs + 1e-12);
  }
}

TEST_CASE("derivative matches finite differences") {
  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    SurrogateParams params(std::pow(10.0, rng.uniform(-3, 0)), rng.uniform(0.2, 1.0));
    const double x = 0.1 + 3.0 * rng.uniform01();
    const double h = 1e-6 * x;
    const double fd = (h_value(x + h, params) - h_value(x - h, params)) / (2.0 * h);
    const double an = h_derivative(x, params);
    CHECK(std::abs(fd - an) <= 1e-6 * std::max(1.0, std::abs(an)));
  }
}

TEST_CASE("normalized norm counts nonzeros as p -> 0") {
  const Vector v{3.0, -2.0, 0.0, 1.0, 0.0, 5.0};
  const double nnz = 4.0;
  double prev_err = 3.0;
  for (double p : {1e-3, 1e-6, 1e-9}) {
    SurrogateParams params(p, 1.0);
    const double ratio = h_norm(v, params) / std::log(1.0 + 1.0 / p);
    const double err = std::abs(ratio - nnz);
    CHECK(err < prev_err);
    CHECK(err < 3.0);
    prev_err = err;
  }
}

// The sine surrogate satisfies the naive pointwise-limit conditions yet
// scores some dense solution of the fixture system below the sparse one;
// the reason the log surrogate needs its own equivalence analysis.
TEST_CASE("pathological surrogate fixture") {
  const double p = 1.0;
  auto f = [&](double x) { return x == 0.0 ? 0.0 : (x / p) * std::sin(p / x); };
  const double at_sparse = f(1.0);  // F_p(0), solution (1, 0, 0)
  bool found = false;
  for (int n = 1; n <= 10; ++n) {
    const double t = 1.0 / (p * (1.5 * M_PI + 2.0 * M_PI * n));
    const double dense = f(1.0 + t) + 2.0 * f(t);
    if (dense < at_sparse) found = true;
  }
  CHECK(found);
}

TEST_SUITE_END();
