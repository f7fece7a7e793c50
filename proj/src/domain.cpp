#include "mep/domain.hpp"

#include <algorithm>
#include <string>

#include "mep/errors.hpp"
#include "mep/predicates.hpp"

namespace mep {
namespace {

Rect bounding_box(Vec2 a, Vec2 b) {
  return {{std::min(a.x, b.x), std::min(a.y, b.y)}, {std::max(a.x, b.x), std::max(a.y, b.y)}};
}

bool boxes_overlap(const Rect& r, const Rect& s) {
  return r.min.x <= s.max.x && s.min.x <= r.max.x && r.min.y <= s.max.y && s.min.y <= r.max.y;
}

bool is_simple(const Polygon& poly) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (poly[i] == poly[(i + 1) % n]) return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = poly[i], b = poly[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vec2 c = poly[j], d = poly[(j + 1) % n];
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) {
        // Neighbouring edges share one vertex; they must not overlap beyond it.
        const Vec2 shared = (j == i + 1) ? b : a;
        const Vec2 far_i = (j == i + 1) ? a : b;
        const Vec2 far_j = (j == i + 1) ? d : c;
        if (predicates::orient2d(far_i, shared, far_j) == 0 &&
            (predicates::on_segment(far_i, shared, far_j) ||
             predicates::on_segment(shared, far_j, far_i))) {
          return false;
        }
        continue;
      }
      if (predicates::segments_intersect(a, b, c, d)) return false;
    }
  }
  return true;
}

}  // namespace

double signed_area(const Polygon& polygon) {
  double twice = 0.0;
  for (std::size_t i = 0, n = polygon.size(); i < n; ++i) {
    twice += cross(polygon[i], polygon[(i + 1) % n]);
  }
  return 0.5 * twice;
}

Domain::Domain(Rect bounds, std::vector<Polygon> obstacles)
    : bounds_(bounds), obstacles_(std::move(obstacles)) {
  if (!(bounds_.width() > 0.0 && bounds_.height() > 0.0)) {
    throw ValidationError("domain bounds must have positive width and height");
  }
  for (std::size_t k = 0; k < obstacles_.size(); ++k) {
    const Polygon& poly = obstacles_[k];
    const std::string tag = "obstacle " + std::to_string(k);
    if (poly.size() < 3) throw ValidationError(tag + " needs at least 3 vertices");
    for (Vec2 v : poly) {
      if (!bounds_.contains(v)) throw ValidationError(tag + " must lie within bounds");
    }
    if (!is_simple(poly)) throw ValidationError(tag + " must be a simple polygon");
    if (signed_area(poly) <= 0.0) throw ValidationError(tag + " must be counterclockwise");

    Rect box{poly.front(), poly.front()};
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Vec2 a = poly[i], b = poly[(i + 1) % poly.size()];
      edges_.push_back({a, b, bounding_box(a, b)});
      box.min = {std::min(box.min.x, a.x), std::min(box.min.y, a.y)};
      box.max = {std::max(box.max.x, a.x), std::max(box.max.y, a.y)};
    }
    obstacle_boxes_.push_back(box);
  }
}

bool Domain::point_in_obstacle(Vec2 p) const {
  for (std::size_t k = 0; k < obstacles_.size(); ++k) {
    if (!obstacle_boxes_[k].contains(p)) continue;
    const Polygon& poly = obstacles_[k];
    const std::size_t n = poly.size();
    bool inside = false;
    bool on_boundary = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const Vec2 a = poly[j], b = poly[i];
      if (predicates::on_segment(a, b, p)) {
        on_boundary = true;
        break;
      }
      // Half-open crossing rule on the horizontal ray towards +x.
      if ((a.y > p.y) != (b.y > p.y)) {
        const int side = predicates::orient2d(a, b, p);
        if ((b.y > a.y) ? side > 0 : side < 0) inside = !inside;
      }
    }
    if (!on_boundary && inside) return true;
  }
  return false;
}

bool Domain::segment_clear(Vec2 a, Vec2 b) const {
  if (!bounds_.contains(a) || !bounds_.contains(b)) return false;
  if (obstacles_.empty()) return true;
  const Rect box = bounding_box(a, b);
  for (const Edge& e : edges_) {
    if (!boxes_overlap(box, e.box)) continue;
    if (predicates::segments_intersect(a, b, e.a, e.b)) return false;
  }
  return !point_in_obstacle(a) && !point_in_obstacle(b);
}

}  // namespace mep
