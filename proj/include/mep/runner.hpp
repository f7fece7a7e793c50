#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mep/path.hpp"
#include "mep/scenario.hpp"

namespace mep {

struct SourceOutcome {
  std::optional<PathResult> result;
  /// Set when this source failed; the other sources still run.
  std::string error;
};

struct RunReport {
  std::vector<SourceOutcome> sources;
  std::size_t vertex_count = 0;
  std::size_t triangle_count = 0;
  double delta_p = 0.0;
  int outer_iters = 0;
  double grid_time = 0.0;
  double solve_time = 0.0;
};

struct RunOptions {
  /// Output directory for field.csv, grid.csv, path_<i>.csv and result.json.
  std::optional<std::filesystem::path> out_dir;
  unsigned workers = 0;
  bool optimize = true;
};

/// Builds the grid and solves once, then extracts and optimizes a path per source.
/// The first source's wall time includes grid and solve; later ones only their own path.
RunReport run_solve(const Scenario& scenario, const RunOptions& options = {});

std::string format_double(double v);

std::string field_csv(const SpatialGrid& grid, const ValueField& value);
std::string grid_csv(const SpatialGrid& grid);
std::string path_csv(const Path& path);
std::string report_json(const Scenario& scenario, const RunReport& report);

/// Reads a t,x,y path file (header required).
Path read_path_csv(const std::filesystem::path& file);

}  // namespace mep
