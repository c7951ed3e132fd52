#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "hpq/linalg.hpp"

namespace hpq {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Point2& a, const Point2& b) {
  const double dx = a.x - b.x, dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

/// Receivers (first one is the reference), targets, propagation speed, and
/// the delay jitter level of the simulator. Positions in meters, delays in
/// seconds.
struct TdoaScene {
  std::vector<Point2> receivers;
  std::vector<Point2> targets;
  double c = 3e8;
  double noise_sigma = 0.0;

  void validate() const;
};

/// Delay measurements: one row per non-reference receiver, one column per
/// target. Column identity is never used downstream (the moment sums are
/// symmetric in the targets).
struct DelayTable {
  std::size_t receiver_rows = 0;
  std::size_t target_cols = 0;
  std::vector<double> delays;  // row-major, seconds

  DelayTable() = default;
  DelayTable(std::size_t rows, std::size_t cols)
      : receiver_rows(rows), target_cols(cols), delays(rows * cols, 0.0) {}

  double& at(std::size_t i, std::size_t k) { return delays[i * target_cols + k]; }
  double at(std::size_t i, std::size_t k) const { return delays[i * target_cols + k]; }
};

struct Grid {
  std::vector<Point2> points;
  double spacing = 0.0;  // meters
};

/// Regular nx-by-ny grid covering [zone_min, zone_max], row-major with x
/// fastest; index = iy * nx + ix.
Grid make_grid(Point2 zone_min, Point2 zone_max, std::size_t nx, std::size_t ny);

/// Stacked moment system. Row block u (u = 1..U) holds phi_u applied to the
/// model delays of every grid point; delays are expressed in microseconds
/// before exponentiation and every row is scaled to unit norm together with
/// its b entry (the feasible set is unchanged, the conditioning is not).
struct SparseSystem {
  Matrix A;            // (U * m) x n
  Vector b;            // U * m
  std::size_t U = 0;
  Grid grid;
  Vector row_scale;       // multiplier applied to each row and its b entry
  Vector row_quant_sens;  // per row: sum_k u |l_k|^{u-1}, scaled (systematic shifts)
  Vector row_noise_sens;  // per row: u sqrt(sum_k l_k^{2(u-1)}), scaled (jitter)
  double tau_max_us = 0.0;  // largest |delay| seen, model or measured, in us
};

/// Noiseless range-difference delays relative to the first receiver.
DelayTable true_delays(const TdoaScene& scene);

/// true_delays plus independent Gaussian jitter of noise_sigma seconds per
/// entry; deterministic per seed.
DelayTable simulate_measurements(const TdoaScene& scene, std::uint64_t seed);

/// Discrete circular cross-correlation at every lag, returned as
/// (lag, value) pairs with lags ascending in [-floor(N/2), N - floor(N/2)).
std::vector<std::pair<long, double>> cross_correlate(std::span<const double> sig_a,
                                                     std::span<const double> sig_b);
std::vector<std::pair<long, double>> cross_correlate_serial(
    std::span<const double> sig_a, std::span<const double> sig_b);

/// Builds the sparse moment system for a grid, receiver set and measured
/// delay table. U is the number of moment blocks (U <= target count for the
/// theory to apply; U = K by default upstream).
SparseSystem build_system(const Grid& grid, const std::vector<Point2>& receivers,
                          const DelayTable& L, std::size_t U, double c);

/// Default residual bound for the box-constrained model: three sigma of the
/// noise-induced b perturbation plus a grid-quantization term, both pushed
/// through the row scaling.
double suggest_epsilon(const SparseSystem& system, std::size_t K,
                       double noise_sigma, double c);

/// Optional measurement path: white source signals mixed per receiver,
/// cross-correlated against the reference, K strongest peaks kept. Delay
/// resolution is one sample (1 / sample_rate_hz).
DelayTable signal_delay_table(const TdoaScene& scene, std::uint64_t seed,
                              double sample_rate_hz, std::size_t num_samples);

}  // namespace hpq
