#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "mep/domain.hpp"
#include "mep/sensing.hpp"
#include "mep/solver.hpp"
#include "mep/vec2.hpp"

namespace mep {

struct Path {
  std::vector<Vec2> waypoints;
  double dt = 0.1;

  double length() const;
};

struct PathResult {
  Path path;
  /// Raw-intensity exposure of the optimized path.
  double exposure = 0.0;
  /// Raw-intensity exposure of the extracted path before local optimization.
  double exposure_extracted = 0.0;
  /// Recovered value at the source, scaled units.
  double value_at_source = 0.0;
  int outer_iters = 0;
  double wall_time = 0.0;
};

struct OptimizerConfig {
  int candidates = 16;
  /// Search radius as a fraction of speed * dt.
  double radius_factor = 0.5;
  int max_passes = 20;
  std::uint64_t seed = 1;

  bool operator==(const OptimizerConfig&) const = default;
};

/// Follows the greedy Bellman argmin from source until within speed * dt of the goal.
/// Throws Unreachable.
Path extract_path(const ValueField& value, const IntensityField& field, const Domain& domain,
                  Vec2 source, Vec2 goal, const SolverConfig& config);

/// Composite trapezoid of f over ceil(|b - a| / h) equal pieces of segment ab.
template <class F>
double trapezoid(F&& f, Vec2 a, Vec2 b, double h) {
  const double len = distance(a, b);
  if (len == 0.0) return 0.0;
  const auto pieces = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / h)));
  double sum = 0.5 * (f(a) + f(b));
  for (std::size_t k = 1; k < pieces; ++k) {
    sum += f(a + (b - a) * (static_cast<double>(k) / static_cast<double>(pieces)));
  }
  return sum * (len / static_cast<double>(pieces));
}

/// Raw-intensity trapezoid along ab at spacing h_eval.
double segment_exposure(const IntensityField& field, Vec2 a, Vec2 b, double h_eval);

double evaluate_exposure(const IntensityField& field, const Path& path, double h_eval);

/// Seeded coordinate descent over interior waypoints; never increases exposure.
Path local_optimize(const IntensityField& field, const Domain& domain, const Path& path,
                    double speed, double h_eval, const OptimizerConfig& config = {});

}  // namespace mep
