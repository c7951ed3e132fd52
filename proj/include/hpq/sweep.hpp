#pragma once

#include <cstdint>
#include <vector>

#include "hpq/io.hpp"
#include "hpq/locator.hpp"

namespace hpq {

struct TrialRow {
  std::uint64_t seed = 0;
  int K = 0;
  int m = 0;           // receiver count
  double noise_ns = 0.0;
  int trial = 0;
  bool success = false;  // every target within spacing / 2
  double rmse_m = 0.0;
  int iterations = 0;
};

struct CellStat {
  int m = 0;
  int K = 0;
  double noise_ns = 0.0;
  int trials = 0;
  double success_ratio = 0.0;
  double mean_rmse_m = 0.0;
};

struct SweepResult {
  std::vector<TrialRow> rows;
  std::vector<CellStat> cells;
};

/// One randomized scene. Receivers are a prefix of a per-trial pool and
/// targets the first K entries of a per-trial grid permutation, so cells
/// that share a trial index share their randomness: curves over K and m
/// are paired rather than independently sampled.
struct TrialScene {
  std::vector<Point2> receivers;
  std::vector<Point2> targets;
  Grid grid;
};

TrialScene make_trial_scene(const SweepSpec& spec, int m, int K,
                            std::uint64_t trial_seed);

/// Derives the per-trial master seed (seed_base + trial index, mixed).
std::uint64_t trial_seed(const SweepSpec& spec, int trial);

/// Runs every (m, K, noise) cell for the requested trials. Rows come back
/// in deterministic cell-major order regardless of thread count.
SweepResult run_sweep(const SweepSpec& spec);

void write_sweep_trials_csv(const std::string& path, const SweepResult& result);
void write_sweep_cells_csv(const std::string& path, const SweepResult& result);

}  // namespace hpq
