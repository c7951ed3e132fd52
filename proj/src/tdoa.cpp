#include "hpq/tdoa.hpp"

#include <algorithm>
#include <cmath>

#include "hpq/error.hpp"
#include "hpq/rng.hpp"

namespace hpq {

void TdoaScene::validate() const {
  require(receivers.size() >= 2, ErrorCode::OutOfRange, "scene: need >= 2 receivers");
  require(!targets.empty(), ErrorCode::OutOfRange, "scene: need >= 1 target");
  require(c > 0.0, ErrorCode::OutOfRange, "scene: propagation speed must be > 0");
  require(noise_sigma >= 0.0, ErrorCode::OutOfRange, "scene: noise sigma must be >= 0");
}

Grid make_grid(Point2 zone_min, Point2 zone_max, std::size_t nx, std::size_t ny) {
  require(nx >= 2 && ny >= 2, ErrorCode::OutOfRange, "grid: need nx, ny >= 2");
  require(zone_max.x > zone_min.x && zone_max.y > zone_min.y, ErrorCode::OutOfRange,
          "grid: degenerate zone");
  Grid g;
  const double dx = (zone_max.x - zone_min.x) / static_cast<double>(nx - 1);
  const double dy = (zone_max.y - zone_min.y) / static_cast<double>(ny - 1);
  g.spacing = std::min(dx, dy);
  g.points.reserve(nx * ny);
  for (std::size_t iy = 0; iy < ny; ++iy)
    for (std::size_t ix = 0; ix < nx; ++ix)
      g.points.push_back({zone_min.x + dx * static_cast<double>(ix),
                          zone_min.y + dy * static_cast<double>(iy)});
  return g;
}

DelayTable true_delays(const TdoaScene& scene) {
  scene.validate();
  const std::size_t m = scene.receivers.size() - 1;
  const std::size_t K = scene.targets.size();
  DelayTable t(m, K);
  for (std::size_t k = 0; k < K; ++k) {
    const double d_ref = distance(scene.targets[k], scene.receivers[0]);
    for (std::size_t i = 0; i < m; ++i) {
      const double d_i = distance(scene.targets[k], scene.receivers[i + 1]);
      t.at(i, k) = (d_i - d_ref) / scene.c;
    }
  }
  return t;
}

DelayTable simulate_measurements(const TdoaScene& scene, std::uint64_t seed) {
  DelayTable t = true_delays(scene);
  if (scene.noise_sigma > 0.0) {
    Rng rng(mix_seed(seed, 0x7d0aULL));
    for (double& d : t.delays) d += scene.noise_sigma * rng.normal();
  }
  return t;
}

namespace {

std::vector<std::pair<long, double>> cross_correlate_impl(
    std::span<const double> a, std::span<const double> b, bool parallel) {
  require(a.size() == b.size(), ErrorCode::LengthMismatch,
          "cross_correlate: length mismatch");
  require(a.size() >= 2, ErrorCode::LengthMismatch, "cross_correlate: need length >= 2");
  const long n = static_cast<long>(a.size());
  const long lo = -(n / 2);
  std::vector<std::pair<long, double>> out(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static) if (parallel)
  for (long idx = 0; idx < n; ++idx) {
    const long lag = lo + idx;
    double s = 0.0;
    for (long t = 0; t < n; ++t) {
      long u = (t - lag) % n;
      if (u < 0) u += n;
      s += a[static_cast<std::size_t>(t)] * b[static_cast<std::size_t>(u)];
    }
    out[static_cast<std::size_t>(idx)] = {lag, s};
  }
  return out;
}

}  // namespace

std::vector<std::pair<long, double>> cross_correlate(std::span<const double> a,
                                                     std::span<const double> b) {
  return cross_correlate_impl(a, b, true);
}

std::vector<std::pair<long, double>> cross_correlate_serial(std::span<const double> a,
                                                            std::span<const double> b) {
  return cross_correlate_impl(a, b, false);
}

SparseSystem build_system(const Grid& grid, const std::vector<Point2>& receivers,
                          const DelayTable& L, std::size_t U, double c) {
  require(U >= 1, ErrorCode::OutOfRange, "build_system: U must be >= 1");
  require(!grid.points.empty(), ErrorCode::OutOfRange, "build_system: empty grid");
  require(receivers.size() >= 2, ErrorCode::OutOfRange, "build_system: need receivers");
  require(L.receiver_rows == receivers.size() - 1, ErrorCode::DimensionMismatch,
          "build_system: delay rows != non-reference receivers");
  require(c > 0.0, ErrorCode::OutOfRange, "build_system: bad propagation speed");

  const std::size_t m = L.receiver_rows;
  const std::size_t n = grid.points.size();
  const std::size_t K = L.target_cols;

  // Model delays per (receiver pair, grid point), in microseconds.
  Matrix tau_us(m, n);
  Vector pair_tau(m, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double d_ref = distance(grid.points[j], receivers[0]);
    for (std::size_t i = 0; i < m; ++i) {
      const double d_i = distance(grid.points[j], receivers[i + 1]);
      const double t = (d_i - d_ref) / c * 1e6;
      tau_us(i, j) = t;
      pair_tau[i] = std::max(pair_tau[i], std::abs(t));
    }
  }

  SparseSystem sys;
  sys.U = U;
  sys.grid = grid;
  sys.A = Matrix(U * m, n);
  sys.b.assign(U * m, 0.0);
  sys.row_scale.assign(U * m, 1.0);
  sys.row_quant_sens.assign(U * m, 0.0);
  sys.row_noise_sens.assign(U * m, 0.0);

  // phi_u(x) = x^u applied to model and measured delays; powers built
  // incrementally across blocks.
  Matrix apow(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) apow(i, j) = 1.0;
  std::vector<double> lpow(m * K, 1.0);

  for (std::size_t u = 1; u <= U; ++u) {
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t row = (u - 1) * m + i;
      double bsum = 0.0;
      double quant_sens = 0.0, noise_sens2 = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        double& lp = lpow[i * K + k];
        const double l_us = L.at(i, k) * 1e6;
        pair_tau[i] = std::max(pair_tau[i], std::abs(l_us));
        // d(phi_u)/dl at the measured delay: u l^{u-1}.
        const double dphi = static_cast<double>(u) * std::abs(lp);
        quant_sens += dphi;
        noise_sens2 += dphi * dphi;
        lp *= l_us;
        bsum += lp;
      }
      auto dst = sys.A.row(row);
      for (std::size_t j = 0; j < n; ++j) {
        apow(i, j) *= tau_us(i, j);
        dst[j] = apow(i, j);
      }
      double s = 1.0;
      const double rn = norm2(dst);
      if (rn > 0.0) {
        s = 1.0 / rn;
        for (std::size_t j = 0; j < n; ++j) dst[j] *= s;
        bsum *= s;
      }
      sys.row_scale[row] = s;
      sys.b[row] = bsum;
      sys.row_quant_sens[row] = s * quant_sens;
      sys.row_noise_sens[row] = s * std::sqrt(noise_sens2);
    }
  }
  sys.tau_max_us = norm_inf(pair_tau);
  return sys;
}

double suggest_epsilon(const SparseSystem& system, std::size_t K, double noise_sigma,
                       double c) {
  (void)K;
  const double sigma_us = noise_sigma * 1e6;
  const double quant_us = system.grid.spacing / (2.0 * c) * 1e6;
  double noise_term = 0.0, grid_term = 0.0;
  for (std::size_t row = 0; row < system.b.size(); ++row) {
    noise_term = std::max(noise_term, system.row_noise_sens[row] * sigma_us);
    grid_term = std::max(grid_term, system.row_quant_sens[row] * quant_us);
  }
  // Never hand the solver a bound that makes the zero vector feasible: an
  // epsilon at or above ||b||_inf collapses the model.
  const double cap = 0.5 * norm_inf(system.b);
  return std::max(std::min(3.0 * noise_term + grid_term, cap), 1e-12);
}

DelayTable signal_delay_table(const TdoaScene& scene, std::uint64_t seed,
                              double sample_rate_hz, std::size_t num_samples) {
  scene.validate();
  require(sample_rate_hz > 0.0, ErrorCode::OutOfRange, "signal sim: bad sample rate");
  require(num_samples >= 16, ErrorCode::OutOfRange, "signal sim: too few samples");
  const std::size_t m = scene.receivers.size();
  const std::size_t K = scene.targets.size();
  const long n = static_cast<long>(num_samples);

  // White source sequences, one per target.
  std::vector<Vector> sources(K, Vector(num_samples));
  for (std::size_t k = 0; k < K; ++k) {
    Rng rng(mix_seed(seed, 0x515 + k));
    for (double& v : sources[k]) v = rng.normal();
  }
  // Receiver mixtures with circular integer-sample propagation delays.
  std::vector<Vector> received(m, Vector(num_samples, 0.0));
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < K; ++k) {
      const double delay_s = distance(scene.targets[k], scene.receivers[j]) / scene.c;
      const long shift = static_cast<long>(std::lround(delay_s * sample_rate_hz)) % n;
      for (long t = 0; t < n; ++t) {
        long src = (t - shift) % n;
        if (src < 0) src += n;
        received[j][static_cast<std::size_t>(t)] +=
            sources[k][static_cast<std::size_t>(src)];
      }
    }
  }

  DelayTable out(m - 1, K);
  for (std::size_t j = 1; j < m; ++j) {
    auto corr = cross_correlate(received[j], received[0]);
    std::sort(corr.begin(), corr.end(), [](const auto& a, const auto& b) {
      if (std::abs(a.second) != std::abs(b.second))
        return std::abs(a.second) > std::abs(b.second);
      return a.first < b.first;
    });
    for (std::size_t k = 0; k < K; ++k)
      out.at(j - 1, k) = static_cast<double>(corr[k].first) / sample_rate_hz;
  }
  return out;
}

}  // namespace hpq
