#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "hpq/solver.hpp"
#include "hpq/tdoa.hpp"

namespace hpq {

/// Pipeline configuration. delta <= 0 means "use 0.3 * K".
struct LocatorConfig {
  double a = 0.5;              // f_a breakpoint
  int G = 2;                   // refinement depth
  double delta = 0.0;          // pipeline stop score
  double epsilon_score = 0.3;  // per-entry suspect threshold
  SolverConfig solver = SolverConfig::constrained_defaults();
  SurrogateParams surrogate{0.1, 1.0};
  std::size_t K = 1;           // target-count estimate
  std::size_t U = 0;           // moment blocks; 0 means U = K
  std::optional<double> epsilon_override;  // residual bound, else estimated
  bool refine = true;          // gate on the whole refinement stage

  void validate() const;
  double resolved_delta() const { return delta > 0.0 ? delta : 0.3 * static_cast<double>(K); }
  std::size_t resolved_u() const { return U == 0 ? K : U; }
};

/// Everything locate needs about the scene: grid, receivers, measured
/// delays, propagation speed and the jitter level used for the residual
/// bound estimate.
struct SceneInputs {
  Grid grid;
  std::vector<Point2> receivers;
  DelayTable delays;
  double c = 3e8;
  double noise_sigma = 0.0;
};

struct RefinementStep {
  std::size_t grid_index = 0;
  Point2 old_point;
  Point2 new_point;
  double score_before = 0.0;
  double score_after = 0.0;
  int q = 0;
};

struct LocalizationResult {
  std::vector<Point2> positions;        // K entries, largest-|x| grid points
  std::vector<double> matched_errors;   // per ground-truth target, when known
  double fa_score = 0.0;
  std::vector<RefinementStep> refinement_log;
  SolveResult solver_trace;
  bool no_suspects = false;
};

/// Piecewise indicator distance: |x|/a on [0, a], |1 - |x||/(1 - a) beyond;
/// zero exactly at |x| in {0, 1}, one at |x| = a.
double fa_value(double x, double a);

/// Sum of fa_value over the entries.
double fa_score(const Vector& v, double a);

/// Indices whose fa_value is at least epsilon_score.
std::vector<std::size_t> suspect_indices(const Vector& v, double a,
                                         double epsilon_score);

/// Evaluates the nine-candidate neighborhood of grid point `grid_index`
/// (radius spacing / 2^q, eight compass directions plus the point itself);
/// each candidate re-solves the model on the modified grid and is scored
/// with fa_score. Returns the argmin candidate and its score; the winning
/// solve comes back through `best_solve` when non-null.
std::pair<Point2, double> refine_point(std::size_t grid_index, int q,
                                       const Grid& grid, const SceneInputs& scene,
                                       const LocatorConfig& cfg,
                                       SolveResult* best_solve = nullptr);

/// Full pipeline: build system, constrained solve, score, refine suspects,
/// extract the K largest-|x| grid points. When `truth` is given the result
/// carries optimally assigned per-target errors.
LocalizationResult locate(const SceneInputs& scene, const LocatorConfig& cfg,
                          const std::vector<Point2>* truth = nullptr);

/// Distances of the minimum-cost bipartite assignment (Euclidean costs),
/// indexed by truth position.
std::vector<double> matched_distances(const std::vector<Point2>& estimates,
                                      const std::vector<Point2>& truths);

/// Root mean square of the optimally assigned distances.
double rmse(const std::vector<Point2>& estimates, const std::vector<Point2>& truths);

}  // namespace hpq
