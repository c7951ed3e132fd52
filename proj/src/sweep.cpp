#include "hpq/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hpq/error.hpp"
#include "hpq/rng.hpp"

namespace hpq {

std::uint64_t trial_seed(const SweepSpec& spec, int trial) {
  return mix_seed(spec.seed, static_cast<std::uint64_t>(trial));
}

TrialScene make_trial_scene(const SweepSpec& spec, int m, int K,
                            std::uint64_t seed) {
  TrialScene scene;
  scene.grid = make_grid(spec.zone_min, spec.zone_max, spec.nx, spec.ny);

  // Receiver pool shared by every cell of this trial; a larger m extends
  // the prefix instead of redrawing.
  const int max_m = *std::max_element(spec.receiver_counts.begin(),
                                      spec.receiver_counts.end());
  Rng recv_rng(mix_seed(seed, 0xA11CE));
  std::vector<Point2> pool;
  for (int i = 0; i < max_m; ++i)
    pool.push_back({recv_rng.uniform(spec.zone_min.x, spec.zone_max.x),
                    recv_rng.uniform(spec.zone_min.y, spec.zone_max.y)});
  scene.receivers.assign(pool.begin(), pool.begin() + m);

  // Targets: first K of a per-trial permutation of the grid, optionally
  // pushed off-grid along a compass direction.
  Rng targ_rng(mix_seed(seed, 0xB0B));
  std::vector<std::size_t> perm(scene.grid.points.size());
  std::iota(perm.begin(), perm.end(), 0);
  targ_rng.shuffle(perm);
  for (int k = 0; k < K; ++k) {
    Point2 p = scene.grid.points[perm[static_cast<std::size_t>(k)]];
    if (!spec.on_grid && spec.offgrid_fraction > 0.0) {
      const int dir = static_cast<int>(targ_rng.integer(8));
      const double angle = 3.14159265358979323846 * static_cast<double>(dir) / 4.0;
      const double r = spec.offgrid_fraction * scene.grid.spacing;
      p.x += r * std::cos(angle);
      p.y += r * std::sin(angle);
      p.x = std::clamp(p.x, spec.zone_min.x, spec.zone_max.x);
      p.y = std::clamp(p.y, spec.zone_min.y, spec.zone_max.y);
    }
    scene.targets.push_back(p);
  }
  return scene;
}

SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();
#ifdef _OPENMP
  if (spec.threads > 0) omp_set_num_threads(spec.threads);
#endif

  struct Cell {
    int m;
    int K;
    double noise_ns;
  };
  std::vector<Cell> cells;
  for (int m : spec.receiver_counts)
    for (int K : spec.target_counts)
      for (double noise : spec.noise_ns) cells.push_back({m, K, noise});

  const std::size_t total = cells.size() * static_cast<std::size_t>(spec.trials);
  SweepResult result;
  result.rows.resize(total);

#pragma omp parallel for schedule(dynamic)
  for (std::size_t job = 0; job < total; ++job) {
    const Cell cell = cells[job / static_cast<std::size_t>(spec.trials)];
    const int trial = static_cast<int>(job % static_cast<std::size_t>(spec.trials));
    const std::uint64_t seed = trial_seed(spec, trial);
    const TrialScene ts = make_trial_scene(spec, cell.m, cell.K, seed);

    TdoaScene sim;
    sim.receivers = ts.receivers;
    sim.targets = ts.targets;
    sim.c = spec.c;
    sim.noise_sigma = cell.noise_ns * 1e-9;

    SceneInputs inputs;
    inputs.grid = ts.grid;
    inputs.receivers = ts.receivers;
    inputs.delays = simulate_measurements(sim, mix_seed(seed, 0x5eed));
    inputs.c = spec.c;
    inputs.noise_sigma = sim.noise_sigma;

    LocatorConfig cfg = spec.locator;
    cfg.K = static_cast<std::size_t>(cell.K);
    cfg.delta = 0.0;  // resolves to 0.3 * K

    TrialRow row;
    row.seed = seed;
    row.K = cell.K;
    row.m = cell.m;
    row.noise_ns = cell.noise_ns;
    row.trial = trial;
    try {
      const LocalizationResult loc = locate(inputs, cfg, &ts.targets);
      double worst = 0.0, sq = 0.0;
      for (double e : loc.matched_errors) {
        worst = std::max(worst, e);
        sq += e * e;
      }
      row.success = worst <= 0.5 * ts.grid.spacing;
      row.rmse_m = std::sqrt(sq / static_cast<double>(loc.matched_errors.size()));
      row.iterations = loc.solver_trace.iterations;
    } catch (const Error&) {
      row.success = false;
      row.rmse_m = std::numeric_limits<double>::quiet_NaN();
      row.iterations = 0;
    }
    result.rows[job] = row;
  }

  for (std::size_t c = 0; c < cells.size(); ++c) {
    CellStat stat;
    stat.m = cells[c].m;
    stat.K = cells[c].K;
    stat.noise_ns = cells[c].noise_ns;
    stat.trials = spec.trials;
    double ok = 0.0, rm = 0.0;
    int rm_count = 0;
    for (int t = 0; t < spec.trials; ++t) {
      const TrialRow& row = result.rows[c * static_cast<std::size_t>(spec.trials) +
                                        static_cast<std::size_t>(t)];
      if (row.success) ok += 1.0;
      if (std::isfinite(row.rmse_m)) {
        rm += row.rmse_m;
        ++rm_count;
      }
    }
    stat.success_ratio = ok / static_cast<double>(spec.trials);
    stat.mean_rmse_m = rm_count ? rm / rm_count : std::numeric_limits<double>::quiet_NaN();
    result.cells.push_back(stat);
  }
  return result;
}

void write_sweep_trials_csv(const std::string& path, const SweepResult& result) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::ParseError, path + ": cannot open for writing");
  out << "seed,K,m,noise_ns,trial,success,rmse_m,iterations\n";
  for (const TrialRow& r : result.rows) {
    out << r.seed << "," << r.K << "," << r.m << "," << format_number(r.noise_ns) << ","
        << r.trial << "," << (r.success ? 1 : 0) << "," << format_number(r.rmse_m)
        << "," << r.iterations << "\n";
  }
}

void write_sweep_cells_csv(const std::string& path, const SweepResult& result) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::ParseError, path + ": cannot open for writing");
  out << "m,K,noise_ns,trials,success_ratio,mean_rmse_m\n";
  for (const CellStat& c : result.cells) {
    out << c.m << "," << c.K << "," << format_number(c.noise_ns) << "," << c.trials
        << "," << format_number(c.success_ratio) << "," << format_number(c.mean_rmse_m)
        << "\n";
  }
}

}  // namespace hpq
