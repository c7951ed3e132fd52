#pragma once

#include <cstdint>
#include <string>

#include "hpq/linalg.hpp"
#include "hpq/locator.hpp"
#include "hpq/tdoa.hpp"

namespace hpq {

/// Formats with 12 significant digits (the numeric output contract).
std::string format_number(double v);

/// Rounds to 12 significant digits; applied to values before JSON
/// serialization so reports honor the same contract.
double round_sig(double v);

/// Matrix CSV: a "rows,cols" header line, then one comma-separated line
/// per row. Vectors are n-by-1 matrices.
Matrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Matrix& M);
Vector read_vector_csv(const std::string& path);
void write_vector_csv(const std::string& path, const Vector& v);

/// Delay tables share the CSV layout; entries are serialized in
/// nanoseconds and held in seconds in memory.
DelayTable read_delays_csv(const std::string& path);
void write_delays_csv(const std::string& path, const DelayTable& table);

/// Scene document: receivers/targets in meters, propagation speed,
/// noise_sigma_ns, zone box and grid resolution. Positions are validated
/// against the zone.
struct SceneFile {
  TdoaScene scene;
  Point2 zone_min;
  Point2 zone_max;
  std::size_t nx = 0;
  std::size_t ny = 0;

  Grid make_scene_grid() const { return make_grid(zone_min, zone_max, nx, ny); }
};

SceneFile read_scene_json(const std::string& path);
void write_scene_json(const std::string& path, const SceneFile& scene);

LocatorConfig read_locator_config_json(const std::string& path);

/// Monte Carlo sweep specification.
struct SweepSpec {
  std::vector<int> receiver_counts;
  std::vector<int> target_counts;
  std::vector<double> noise_ns;
  int trials = 1;
  std::uint64_t seed = 1;
  Point2 zone_min{0.0, 0.0};
  Point2 zone_max{10000.0, 10000.0};
  std::size_t nx = 21;
  std::size_t ny = 21;
  double c = 3e8;
  bool on_grid = true;
  double offgrid_fraction = 0.5;  // displacement in units of grid spacing
  LocatorConfig locator;          // K is overridden per cell
  int threads = 0;                // 0 = runtime default

  void validate() const;
};

SweepSpec read_sweep_spec_json(const std::string& path);

/// FNV-1a 64-bit digest of a file's bytes, as fixed-width hex.
std::string file_digest(const std::string& path);

}  // namespace hpq
