#include <doctest.h>

#include <cmath>

#include "hpq/error.hpp"
#include "hpq/tdoa.hpp"
#include "test_helpers.hpp"

using namespace hpq;
using namespace hpq::testing;

TEST_SUITE_BEGIN("tdoa");

TEST_CASE("make_grid") {
  Grid g = make_grid({0.0, 0.0}, {10000.0, 10000.0}, 21, 21);
  CHECK(g.points.size() == 441);
  CHECK(g.spacing == doctest::Approx(500.0));
  CHECK(g.points[0].x == 0.0);
  CHECK(g.points[440].x == 10000.0);
  CHECK(g.points[440].y == 10000.0);
  // Row-major with x fastest.
  CHECK(g.points[1].x == doctest::Approx(500.0));
  CHECK(g.points[1].y == 0.0);
  CHECK(g.points[21].x == 0.0);
  CHECK(g.points[21].y == doctest::Approx(500.0));
}

TEST_CASE("true_delays") {
  TdoaScene scene;
  scene.receivers = {{0.0, 0.0}, {3000.0, 0.0}};
  scene.targets = {{3000.0, 4000.0}};
  scene.c = 3e8;

  DelayTable t = true_delays(scene);
  REQUIRE(t.receiver_rows == 1);
  REQUIRE(t.target_cols == 1);
  // 3-4-5 triangle: 4000 m to receiver 2, 5000 m to the reference.
  CHECK(t.at(0, 0) == doctest::Approx((4000.0 - 5000.0) / 3e8).epsilon(1e-12));

  SUBCASE("equidistant target has zero delay") {
    scene.targets = {{1500.0, 777.0}};
    DelayTable tz = true_delays(scene);
    CHECK(tz.at(0, 0) == doctest::Approx(0.0));
  }
  SUBCASE("doubling c halves the delays") {
    DelayTable t1 = true_delays(scene);
    scene.c = 6e8;
    DelayTable t2 = true_delays(scene);
    CHECK(t2.at(0, 0) == doctest::Approx(0.5 * t1.at(0, 0)).epsilon(1e-12));
  }
}

TEST_CASE("simulate_measurements") {
  TdoaScene scene;
  scene.receivers = {{0.0, 0.0}, {4000.0, 100.0}, {300.0, 5000.0}};
  scene.targets = {{2500.0, 2500.0}};
  scene.c = 3e8;

  SUBCASE("zero noise equals the truth") {
    scene.noise_sigma = 0.0;
    DelayTable a = simulate_measurements(scene, 5);
    DelayTable t = true_delays(scene);
    CHECK(max_abs_diff(a.delays, t.delays) == 0.0);
  }
  SUBCASE("deterministic per seed") {
    scene.noise_sigma = 1e-8;
    DelayTable a = simulate_measurements(scene, 5);
    DelayTable b = simulate_measurements(scene, 5);
    DelayTable c = simulate_measurements(scene, 6);
    CHECK(a.delays == b.delays);
    CHECK(a.delays != c.delays);
  }
  SUBCASE("jitter magnitude matches sigma") {
    scene.noise_sigma = 1e-8;
    DelayTable t = true_delays(scene);
    double sq = 0.0;
    const int draws = 5000;
    for (int s = 0; s < draws; ++s) {
      DelayTable a = simulate_measurements(scene, 10000 + s);
      for (std::size_t i = 0; i < a.delays.size(); ++i) {
        const double d = a.delays[i] - t.delays[i];
        sq += d * d;
      }
    }
    const double sd = std::sqrt(sq / (draws * t.delays.size()));
    CHECK(sd == doctest::Approx(1e-8).epsilon(0.2));
  }
}

TEST_CASE("cross_correlate") {
  SUBCASE("identical impulses peak at lag zero") {
    Vector a{0.0, 1.0, 0.0, 0.0};
    auto r = cross_correlate(a, a);
    long best_lag = 99;
    double best = -1.0;
    for (auto [lag, v] : r)
      if (v > best) {
        best = v;
        best_lag = lag;
      }
    CHECK(best_lag == 0);
    CHECK(best == doctest::Approx(1.0));
  }
  SUBCASE("impulse shifted by three peaks at lag three") {
    Vector base(16, 0.0), shifted(16, 0.0);
    base[2] = 1.0;
    shifted[5] = 1.0;  // shifted by +3
    auto r = cross_correlate(shifted, base);
    long best_lag = 99;
    double best = -1.0;
    for (auto [lag, v] : r)
      if (v > best) {
        best = v;
        best_lag = lag;
      }
    CHECK(best_lag == 3);
  }
  SUBCASE("white autocorrelation peaks at the energy") {
    Rng rng(77);
    Vector a(2048);
    for (double& v : a) v = rng.normal();
    auto r = cross_correlate(a, a);
    double peak = 0.0;
    long peak_lag = -1;
    for (auto [lag, v] : r)
      if (v > peak) {
        peak = v;
        peak_lag = lag;
      }
    CHECK(peak_lag == 0);
    CHECK(peak == doctest::Approx(dot(a, a)));
  }
  SUBCASE("independent white sequences stay small") {
    Rng rng(78);
    Vector a(4096), b(4096);
    for (double& v : a) v = rng.normal();
    for (double& v : b) v = rng.normal();
    const double auto_peak = dot(a, a);
    double max_cross = 0.0;
    for (auto [lag, v] : cross_correlate(a, b))
      max_cross = std::max(max_cross, std::abs(v));
    CHECK(max_cross <= 0.1 * auto_peak);
  }
  SUBCASE("parallel equals serial") {
    Rng rng(79);
    Vector a(257), b(257);
    for (double& v : a) v = rng.normal();
    for (double& v : b) v = rng.normal();
    auto r1 = cross_correlate(a, b);
    auto r2 = cross_correlate_serial(a, b);
    REQUIRE(r1.size() == r2.size());
    for (std::size_t i = 0; i < r1.size(); ++i) {
      CHECK(r1[i].first == r2[i].first);
      CHECK(r1[i].second == r2[i].second);
    }
  }
  SUBCASE("length mismatch") {
    Vector a{1.0, 2.0}, b{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(cross_correlate(a, b), Error);
  }
}

TEST_CASE("build_system") {
  Grid grid = make_grid({0.0, 0.0}, {10000.0, 10000.0}, 21, 21);
  Rng rng(31);
  std::vector<Point2> receivers;
  for (int i = 0; i < 6; ++i)
    receivers.push_back({rng.uniform(0.0, 10000.0), rng.uniform(0.0, 10000.0)});

  SUBCASE("dimensions") {
    TdoaScene scene;
    scene.receivers = receivers;
    scene.targets = {grid.points[5], grid.points[100], grid.points[200]};
    DelayTable L = true_delays(scene);
    SparseSystem sys = build_system(grid, receivers, L, 3, 3e8);
    CHECK(sys.A.rows() == 15);
    CHECK(sys.A.cols() == 441);
    CHECK(sys.b.size() == 15);
  }

  SUBCASE("on-grid indicator satisfies the system for every U <= K") {
    TdoaScene scene;
    scene.receivers = receivers;
    scene.targets = {grid.points[17], grid.points[230], grid.points[388],
                     grid.points[41]};
    DelayTable L = true_delays(scene);
    for (std::size_t U = 1; U <= 4; ++U) {
      SparseSystem sys = build_system(grid, receivers, L, U, 3e8);
      Vector x(441, 0.0);
      x[17] = x[230] = x[388] = x[41] = 1.0;
      CHECK(norm_inf(residual(sys.A, x, sys.b)) <= 1e-9);
    }
  }

  SUBCASE("b is symmetric in the target order") {
    TdoaScene scene;
    scene.receivers = receivers;
    scene.targets = {grid.points[10], grid.points[20], grid.points[30]};
    DelayTable L = true_delays(scene);
    // Swap two target columns.
    DelayTable P = L;
    for (std::size_t i = 0; i < P.receiver_rows; ++i)
      std::swap(P.at(i, 0), P.at(i, 2));
    SparseSystem s1 = build_system(grid, receivers, L, 3, 3e8);
    SparseSystem s2 = build_system(grid, receivers, P, 3, 3e8);
    CHECK(max_abs_diff(s1.b, s2.b) <= 1e-12 * std::max(1.0, norm_inf(s1.b)));
  }

  SUBCASE("translation invariance") {
    TdoaScene scene;
    scene.receivers = receivers;
    scene.targets = {grid.points[99], grid.points[300]};
    DelayTable L = true_delays(scene);
    SparseSystem s1 = build_system(grid, receivers, L, 2, 3e8);

    const Point2 offset{1234.5, -321.0};
    Grid grid2 = grid;
    for (auto& p : grid2.points) {
      p.x += offset.x;
      p.y += offset.y;
    }
    std::vector<Point2> recv2 = receivers;
    for (auto& p : recv2) {
      p.x += offset.x;
      p.y += offset.y;
    }
    SparseSystem s2 = build_system(grid2, recv2, L, 2, 3e8);
    CHECK(max_abs_diff(s1.A.data(), s2.A.data()) <= 1e-9);
    CHECK(max_abs_diff(s1.b, s2.b) <= 1e-9);
  }

  SUBCASE("U  = 1 rows are plain delay sums before row scaling") {
    TdoaScene scene;
    scene.receivers = receivers;
    scene.targets = {grid.points[42], grid.points[111]};
    DelayTable L = true_delays(scene);
    SparseSystem sys = build_system(grid, receivers, L, 1, 3e8);
    for (std::size_t i = 0; i < 5; ++i) {
      double raw = 0.0;
      for (std::size_t k = 0; k < 2; ++k) raw += L.at(i, k) * 1e6;
      CHECK(sys.b[i] / sys.row_scale[i] == doctest::Approx(raw).epsilon(1e-12));
    }
  }
}

TEST_CASE("signal-level delay extraction") {
  TdoaScene scene;
  scene.receivers = {{0.0, 0.0}, {6000.0, 0.0}, {0.0, 6000.0}};
  scene.targets = {{4500.0, 4500.0}};
  scene.c = 3e8;
  const double fs = 50e6;  // 20 ns resolution
  DelayTable est = signal_delay_table(scene, 11, fs, 4096);
  DelayTable truth = true_delays(scene);
  for (std::size_t i = 0; i < truth.delays.size(); ++i)
    CHECK(std::abs(est.delays[i] - truth.delays[i]) <= 1.0 / fs + 1e-12);
}

TEST_SUITE_END();
