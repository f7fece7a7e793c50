#pragma once

#include <vector>

#include "mep/scenario.hpp"

namespace mep {

struct OracleResult {
  double exposure = 0.0;
  std::vector<Vec2> path;
};

/// Shortest path on a regular lattice of spacing ~h with 16-neighbour edges,
/// weighted by the raw-intensity trapezoid along each edge. Nodes inside obstacles
/// are removed and edges must be segment_clear. Source and goal connect to their
/// nearest visible lattice node. Throws Unreachable.
OracleResult dijkstra_oracle(const Scenario& scenario, double h, std::size_t source_index = 0);

struct RichardsonEstimate {
  std::vector<double> h;
  std::vector<double> exposure;
  double order = 1.0;
  double limit = 0.0;
};

/// Oracle at h, h/2, h/4 and the extrapolated h -> 0 limit.
RichardsonEstimate richardson_oracle(const Scenario& scenario, double h,
                                     std::size_t source_index = 0);

}  // namespace mep
