#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mep/delaunay.hpp"
#include "mep/domain.hpp"
#include "mep/sensing.hpp"
#include "mep/vec2.hpp"

namespace mep {

enum class VertexClass : std::uint8_t { Free, Goal, Obstacle, DomainBoundary };

std::string_view to_string(VertexClass c);

struct GridConfig {
  int points_per_node = 100;
  double boundary_spacing = 0.5;
  /// Acceptance probability floor of the intensity-weighted rejection sampler.
  double base_rate = 0.1;
  std::uint64_t rng_seed = 1;
  /// Number of uniform probes used to estimate the peak scaled intensity.
  int intensity_probes = 256;

  void validate() const;
  bool operator==(const GridConfig&) const = default;
};

struct GridVertices {
  std::vector<Vec2> points;
  std::vector<VertexClass> classes;
  std::size_t goal_index = 0;
  /// Vertex index of each requested source (equal to goal_index if they coincide).
  std::vector<std::size_t> source_indices;
};

/// Draws the unstructured vertex set: goal and sources verbatim, obstacle rings,
/// domain corners and edges, then interior points accepted with probability
/// base_rate + (1 - base_rate) * min(1, I(p) / I_max). Deterministic in
/// rng_seed. Throws GoalInObstacle / SourceInObstacle.
GridVertices sample_grid(const Domain& domain, const IntensityField& field, Vec2 goal,
                         std::span<const Vec2> sources, const GridConfig& config);

struct Barycentric {
  std::size_t triangle;
  std::array<std::uint32_t, 3> vertices;
  std::array<double, 3> weights;
};

/// Delaunay-triangulated vertex set with point location. Immutable.
class SpatialGrid {
 public:
  SpatialGrid(GridVertices vertices, std::vector<Triangle> triangles, double delta_p);
  ~SpatialGrid();
  SpatialGrid(SpatialGrid&&) noexcept;
  SpatialGrid& operator=(SpatialGrid&&) noexcept;

  std::span<const Vec2> vertices() const noexcept { return vertices_.points; }
  std::span<const VertexClass> classes() const noexcept { return vertices_.classes; }
  std::span<const Triangle> triangles() const noexcept { return triangles_; }
  std::size_t vertex_count() const noexcept { return vertices_.points.size(); }
  std::size_t goal_index() const noexcept { return vertices_.goal_index; }
  std::span<const std::size_t> source_indices() const noexcept {
    return vertices_.source_indices;
  }
  /// Largest distance from a probed domain point to its nearest vertex.
  double delta_p() const noexcept { return delta_p_; }

  /// Lowest-index triangle containing p (boundary inclusive), or nullopt outside the hull.
  std::optional<std::size_t> locate(Vec2 p) const;
  std::optional<Barycentric> barycentric(Vec2 p) const;

  /// Piecewise-linear interpolation of per-vertex values; 1 outside the hull.
  double interpolate(std::span<const double> values, Vec2 p) const;

  std::size_t nearest_vertex(Vec2 p) const;

 private:
  class Locator;
  class NearestIndex;

  GridVertices vertices_;
  std::vector<Triangle> triangles_;
  double delta_p_;
  std::unique_ptr<Locator> locator_;
  std::unique_ptr<NearestIndex> nearest_;

  friend double estimate_delta_p(const SpatialGrid&, const Domain&, int);
  friend SpatialGrid triangulate(GridVertices, const Domain&);
};

/// Max nearest-vertex distance over a resolution x resolution lattice of the
/// domain, skipping lattice points strictly inside obstacles.
double estimate_delta_p(const SpatialGrid& grid, const Domain& domain, int resolution = 512);

/// Triangulates the vertices and records delta_p against the domain.
SpatialGrid triangulate(GridVertices vertices, const Domain& domain);

/// sample_grid followed by triangulate.
SpatialGrid build_grid(const Domain& domain, const IntensityField& field, Vec2 goal,
                       std::span<const Vec2> sources, const GridConfig& config);

}  // namespace mep
