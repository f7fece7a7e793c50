#pragma once

#include <vector>

#include "mep/vec2.hpp"

namespace mep {

struct Rect {
  Vec2 min;
  Vec2 max;

  double width() const noexcept { return max.x - min.x; }
  double height() const noexcept { return max.y - min.y; }
  double diameter() const noexcept { return std::hypot(width(), height()); }
  bool operator==(const Rect&) const = default;
  bool contains(Vec2 p) const noexcept {
    return min.x <= p.x && p.x <= max.x && min.y <= p.y && p.y <= max.y;
  }
};

/// Simple polygon, counterclockwise vertex order.
using Polygon = std::vector<Vec2>;

double signed_area(const Polygon& polygon);

/// Rectangular workspace with polygonal forbidden regions.
class Domain {
 public:
  /// Throws ValidationError on non-positive extent or an invalid obstacle.
  explicit Domain(Rect bounds, std::vector<Polygon> obstacles = {});

  const Rect& bounds() const noexcept { return bounds_; }
  const std::vector<Polygon>& obstacles() const noexcept { return obstacles_; }
  double diameter() const noexcept { return bounds_.diameter(); }

  /// Strictly inside some obstacle (even-odd rule). Boundary points are outside.
  bool point_in_obstacle(Vec2 p) const;

  /// The closed segment ab stays in bounds, neither endpoint is inside an obstacle,
  /// and it touches no obstacle edge.
  bool segment_clear(Vec2 a, Vec2 b) const;

 private:
  struct Edge {
    Vec2 a, b;
    Rect box;
  };

  Rect bounds_;
  std::vector<Polygon> obstacles_;
  std::vector<Rect> obstacle_boxes_;
  std::vector<Edge> edges_;
};

}  // namespace mep
