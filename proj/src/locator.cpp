#include "hpq/locator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hpq/error.hpp"

namespace hpq {

void LocatorConfig::validate() const {
  require(a > 0.0 && a < 1.0, ErrorCode::OutOfRange, "locator: need 0 < a < 1");
  require(G >= 1, ErrorCode::OutOfRange, "locator: refinement depth must be >= 1");
  require(epsilon_score >= 0.0, ErrorCode::OutOfRange,
          "locator: epsilon_score must be >= 0");
  require(K >= 1, ErrorCode::OutOfRange, "locator: K must be >= 1");
  require(resolved_delta() > 0.0, ErrorCode::OutOfRange, "locator: delta must be > 0");
  solver.validate();
}

double fa_value(double x, double a) {
  const double ax = std::abs(x);
  if (ax <= a) return ax / a;
  return std::abs(1.0 - ax) / (1.0 - a);
}

double fa_score(const Vector& v, double a) {
  double s = 0.0;
  for (double x : v) s += fa_value(x, a);
  return s;
}

std::vector<std::size_t> suspect_indices(const Vector& v, double a,
                                         double epsilon_score) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (fa_value(v[i], a) >= epsilon_score) out.push_back(i);
  return out;
}

namespace {

struct CandidateOutcome {
  double score = std::numeric_limits<double>::infinity();
  SolveResult solve;
  bool ok = false;
};

SolveResult solve_scene(const Grid& grid, const SceneInputs& scene,
                        const LocatorConfig& cfg) {
  SparseSystem sys =
      build_system(grid, scene.receivers, scene.delays, cfg.resolved_u(), scene.c);
  SolverConfig solver_cfg = cfg.solver;
  solver_cfg.epsilon = cfg.epsilon_override.value_or(
      suggest_epsilon(sys, cfg.K, scene.noise_sigma, scene.c));
  return solve_constrained(sys.A, sys.b, cfg.surrogate, solver_cfg);
}

}  // namespace

std::pair<Point2, double> refine_point(std::size_t grid_index, int q,
                                       const Grid& grid, const SceneInputs& scene,
                                       const LocatorConfig& cfg,
                                       SolveResult* best_solve) {
  require(grid_index < grid.points.size(), ErrorCode::OutOfRange,
          "refine_point: bad grid index");
  require(q >= 1 && q <= cfg.G, ErrorCode::OutOfRange, "refine_point: bad depth q");

  const Point2 w = grid.points[grid_index];
  const double radius = grid.spacing / std::pow(2.0, static_cast<double>(q));
  std::vector<Point2> candidates;
  candidates.push_back(w);
  for (int j = 1; j <= 8; ++j) {
    const double angle = 3.14159265358979323846 * static_cast<double>(j - 1) / 4.0;
    candidates.push_back({w.x + radius * std::cos(angle), w.y + radius * std::sin(angle)});
  }

  std::vector<CandidateOutcome> outcomes(candidates.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
    Grid trial = grid;
    trial.points[grid_index] = candidates[ci];
    try {
      SolveResult sr = solve_scene(trial, scene, cfg);
      outcomes[ci].score = fa_score(sr.x, cfg.a);
      outcomes[ci].solve = std::move(sr);
      outcomes[ci].ok = true;
    } catch (const Error&) {
      // failed candidate keeps the +inf score
    }
  }

  std::size_t best = 0;
  for (std::size_t ci = 1; ci < outcomes.size(); ++ci)
    if (outcomes[ci].score < outcomes[best].score) best = ci;
  require(outcomes[best].ok, ErrorCode::Internal, "refine_point: every candidate failed");
  if (best_solve) *best_solve = std::move(outcomes[best].solve);
  return {candidates[best], outcomes[best].score};
}

LocalizationResult locate(const SceneInputs& scene, const LocatorConfig& cfg,
                          const std::vector<Point2>* truth) {
  cfg.validate();
  require(scene.receivers.size() >= 2, ErrorCode::OutOfRange, "locate: need receivers");
  require(scene.delays.receiver_rows == scene.receivers.size() - 1,
          ErrorCode::DimensionMismatch, "locate: delay rows != receivers - 1");

  Grid grid = scene.grid;
  LocalizationResult res;
  res.solver_trace = solve_scene(grid, scene, cfg);
  double score = fa_score(res.solver_trace.x, cfg.a);
  const double delta = cfg.resolved_delta();

  if (score >= delta && cfg.refine) {
    auto suspects = suspect_indices(res.solver_trace.x, cfg.a, cfg.epsilon_score);
    if (suspects.empty()) {
      res.no_suspects = true;
    } else {
      // Most suspicious first: the dominant share of a blended off-grid
      // target is the point worth moving; index order can stop the whole
      // stage on a cosmetic score drop instead.
      const Vector& xs = res.solver_trace.x;
      std::stable_sort(suspects.begin(), suspects.end(),
                       [&](std::size_t a_, std::size_t b_) {
                         return fa_value(xs[a_], cfg.a) > fa_value(xs[b_], cfg.a);
                       });
      bool done = false;
      for (std::size_t idx : suspects) {
        for (int q = 1; q <= cfg.G && !done; ++q) {
          SolveResult sr;
          auto [pt, new_score] = refine_point(idx, q, grid, scene, cfg, &sr);
          res.refinement_log.push_back(
              {idx, grid.points[idx], pt, score, new_score, q});
          grid.points[idx] = pt;
          score = new_score;
          res.solver_trace = std::move(sr);
          if (score <= delta) done = true;
        }
        if (done) break;
      }
    }
  }
  res.fa_score = score;

  // Step 6: the K largest magnitudes pick the positions; ties resolved by
  // lower grid index (stable sort on descending magnitude).
  const Vector& x = res.solver_trace.x;
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a_, std::size_t b_) {
    return std::abs(x[a_]) > std::abs(x[b_]);
  });
  res.positions.reserve(cfg.K);
  for (std::size_t r = 0; r < cfg.K && r < order.size(); ++r)
    res.positions.push_back(grid.points[order[r]]);

  if (truth) res.matched_errors = matched_distances(res.positions, *truth);
  return res;
}

std::vector<double> matched_distances(const std::vector<Point2>& estimates,
                                      const std::vector<Point2>& truths) {
  require(estimates.size() == truths.size(), ErrorCode::CountMismatch,
          "matched_distances: count mismatch");
  const std::size_t n = truths.size();
  if (n == 0) return {};
  require(n <= 20, ErrorCode::TooLarge, "matched_distances: assignment guard");

  std::vector<std::vector<double>> cost(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) cost[i][j] = distance(estimates[i], truths[j]);

  // Exact assignment by subset DP: estimates in order, mask = truths used.
  const std::size_t full = (std::size_t{1} << n);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> f(full, inf);
  std::vector<std::int8_t> choice(full, -1);
  f[0] = 0.0;
  for (std::size_t mask = 0; mask < full; ++mask) {
    if (f[mask] == inf) continue;
    const std::size_t i = static_cast<std::size_t>(__builtin_popcountll(mask));
    if (i == n) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (mask & (std::size_t{1} << j)) continue;
      const std::size_t nm = mask | (std::size_t{1} << j);
      const double v = f[mask] + cost[i][j];
      if (v < f[nm]) {
        f[nm] = v;
        choice[nm] = static_cast<std::int8_t>(j);
      }
    }
  }
  // Backtrack the optimal pairing.
  std::vector<double> errors(n, 0.0);
  std::size_t mask = full - 1;
  for (std::size_t i = n; i-- > 0;) {
    const std::size_t j = static_cast<std::size_t>(choice[mask]);
    errors[j] = cost[i][j];
    mask &= ~(std::size_t{1} << j);
  }
  return errors;
}

double rmse(const std::vector<Point2>& estimates, const std::vector<Point2>& truths) {
  const auto d = matched_distances(estimates, truths);
  if (d.empty()) return 0.0;
  double s = 0.0;
  for (double v : d) s += v * v;
  return std::sqrt(s / static_cast<double>(d.size()));
}

}  // namespace hpq
