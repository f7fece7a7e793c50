#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mep/domain.hpp"
#include "mep/grid.hpp"
#include "mep/path.hpp"
#include "mep/sensing.hpp"
#include "mep/solver.hpp"

namespace mep {

struct Scenario {
  Rect bounds;
  std::vector<Polygon> obstacles;
  std::vector<SensorNode> nodes;
  IntensityMode mode = IntensityMode::MaxSensor;
  double omega = 100.0;
  double eps_floor = kDefaultIntensityFloor;
  std::vector<Vec2> sources;
  Vec2 goal;
  GridConfig grid;
  SolverConfig solver;
  OptimizerConfig optimizer;
  /// Exposure quadrature spacing; defaults to 1e-3 of the domain diameter.
  std::optional<double> h_eval;

  Domain domain() const { return Domain(bounds, obstacles); }
  IntensityField field() const { return IntensityField(nodes, mode, omega, eps_floor); }
  double eval_resolution() const { return h_eval.value_or(1e-3 * bounds.diameter()); }

  /// Throws ValidationError naming the first violated invariant.
  void validate() const;

  bool operator==(const Scenario&) const = default;
};

/// Parses and validates a scenario document. Throws ParseError / ValidationError.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& file);

/// Canonical document; parse_scenario(serialize_scenario(s)) == s.
std::string serialize_scenario(const Scenario& scenario);

/// One "x y" or "x,y" row per node, '#' comments and blank lines ignored.
std::vector<SensorNode> parse_nodes(const std::string& text, const SensingModel& model);
std::vector<SensorNode> import_nodes(const std::filesystem::path& file,
                                     const SensingModel& model);

/// Model used by the benchmark instances.
inline SensingModel benchmark_node_model() { return NoisyProbability{100.0, 1.0, 1.0, 6.0}; }

std::string read_text(const std::filesystem::path& file);

/// Writes through a temporary sibling and renames into place.
void write_text_atomic(const std::filesystem::path& file, const std::string& text);

}  // namespace mep
