#include "mep/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <unordered_map>

#include "mep/errors.hpp"
#include "mep/predicates.hpp"

namespace mep {
namespace {

// Uniform [0, 1) from the top 53 bits; identical on every platform.
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : rng_(seed) {}
  double operator()() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 rng_;
};

int class_priority(VertexClass c) {
  switch (c) {
    case VertexClass::Goal: return 0;
    case VertexClass::Obstacle: return 2;
    case VertexClass::DomainBoundary: return 3;
    case VertexClass::Free: return 4;
  }
  return 4;
}

// Inserts points first-come-first-kept, merging anything within tol of a kept point.
class Deduper {
 public:
  Deduper(Vec2 origin, double tol) : origin_(origin), tol_(tol) {}

  // Returns the index of the kept point.
  std::size_t add(GridVertices& out, Vec2 p, VertexClass c) {
    const auto [cx, cy] = cell(p);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        auto it = buckets_.find(key(cx + dx, cy + dy));
        if (it == buckets_.end()) continue;
        for (std::size_t idx : it->second) {
          if (distance(out.points[idx], p) <= tol_) {
            if (class_priority(c) < class_priority(out.classes[idx])) out.classes[idx] = c;
            return idx;
          }
        }
      }
    }
    out.points.push_back(p);
    out.classes.push_back(c);
    buckets_[key(cx, cy)].push_back(out.points.size() - 1);
    return out.points.size() - 1;
  }

 private:
  std::pair<std::int64_t, std::int64_t> cell(Vec2 p) const {
    return {static_cast<std::int64_t>(std::floor((p.x - origin_.x) / tol_)),
            static_cast<std::int64_t>(std::floor((p.y - origin_.y) / tol_))};
  }
  static std::uint64_t key(std::int64_t x, std::int64_t y) {
    return (static_cast<std::uint64_t>(x) * 0x9E3779B97F4A7C15ull) ^ static_cast<std::uint64_t>(y);
  }

  Vec2 origin_;
  double tol_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;
};

// Points on segment ab at spacing <= h, excluding b.
void subdivide(Vec2 a, Vec2 b, double h, std::vector<Vec2>& out) {
  const double len = distance(a, b);
  const auto pieces = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / h)));
  for (std::size_t k = 0; k < pieces; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(pieces);
    out.push_back(a + (b - a) * t);
  }
}

Rect box_of(std::span<const Vec2> pts) {
  Rect r{pts.front(), pts.front()};
  for (Vec2 p : pts) {
    r.min = {std::min(r.min.x, p.x), std::min(r.min.y, p.y)};
    r.max = {std::max(r.max.x, p.x), std::max(r.max.y, p.y)};
  }
  return r;
}

}  // namespace

std::string_view to_string(VertexClass c) {
  switch (c) {
    case VertexClass::Free: return "free";
    case VertexClass::Goal: return "goal";
    case VertexClass::Obstacle: return "obstacle";
    case VertexClass::DomainBoundary: return "boundary";
  }
  return "free";
}

void GridConfig::validate() const {
  if (points_per_node < 0) throw ValidationError("points_per_node must be >= 0");
  if (!(boundary_spacing > 0.0)) throw ValidationError("boundary_spacing must be > 0");
  if (!(base_rate > 0.0 && base_rate <= 1.0)) {
    throw ValidationError("base_rate must lie in (0, 1]");
  }
  if (intensity_probes < 1) throw ValidationError("intensity_probes must be >= 1");
}

GridVertices sample_grid(const Domain& domain, const IntensityField& field, Vec2 goal,
                         std::span<const Vec2> sources, const GridConfig& config) {
  config.validate();
  const Rect& bounds = domain.bounds();
  if (!bounds.contains(goal)) throw ValidationError("goal must lie within bounds");
  if (domain.point_in_obstacle(goal)) throw GoalInObstacle();
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (!bounds.contains(sources[i])) {
      throw ValidationError("source " + std::to_string(i) + " must lie within bounds");
    }
    if (domain.point_in_obstacle(sources[i])) throw SourceInObstacle(i);
  }

  GridVertices out;
  Deduper dedupe(bounds.min, 1e-9 * domain.diameter());
  out.goal_index = dedupe.add(out, goal, VertexClass::Goal);
  for (Vec2 s : sources) out.source_indices.push_back(dedupe.add(out, s, VertexClass::Free));

  std::vector<Vec2> ring;
  for (const Polygon& poly : domain.obstacles()) {
    ring.clear();
    for (std::size_t i = 0; i < poly.size(); ++i) {
      subdivide(poly[i], poly[(i + 1) % poly.size()], config.boundary_spacing, ring);
    }
    for (Vec2 p : ring) dedupe.add(out, p, VertexClass::Obstacle);
  }

  const std::array<Vec2, 4> corners{
      bounds.min, Vec2{bounds.max.x, bounds.min.y}, bounds.max, Vec2{bounds.min.x, bounds.max.y}};
  // Goal and sources on the outer boundary split its edges, so no boundary
  // point lands a sliver away from them.
  std::vector<Vec2> pinned{goal};
  pinned.insert(pinned.end(), sources.begin(), sources.end());
  ring.clear();
  for (std::size_t i = 0; i < 4; ++i) {
    const Vec2 a = corners[i], b = corners[(i + 1) % 4];
    std::vector<double> cuts;
    for (Vec2 q : pinned) {
      const bool on_edge = a.x == b.x ? q.x == a.x : q.y == a.y;
      const double t = dot(q - a, b - a) / dot(b - a, b - a);
      if (on_edge && t > 0.0 && t < 1.0) cuts.push_back(t);
    }
    std::sort(cuts.begin(), cuts.end());
    Vec2 from = a;
    for (double t : cuts) {
      const Vec2 to = a + (b - a) * t;
      subdivide(from, to, config.boundary_spacing, ring);
      from = to;
    }
    subdivide(from, b, config.boundary_spacing, ring);
  }
  for (Vec2 p : ring) dedupe.add(out, p, VertexClass::DomainBoundary);

  Uniform uniform(config.rng_seed);
  const auto draw = [&] {
    const double x = bounds.min.x + bounds.width() * uniform();
    const double y = bounds.min.y + bounds.height() * uniform();
    return Vec2{x, y};
  };

  double peak = 0.0;
  for (int k = 0; k < config.intensity_probes; ++k) {
    peak = std::max(peak, field.scaled_intensity(draw()));
  }

  const std::size_t target =
      static_cast<std::size_t>(config.points_per_node) * field.nodes().size();
  const std::size_t max_draws = 10000 * target + 1000;
  std::size_t accepted = 0;
  for (std::size_t draws = 0; accepted < target && draws < max_draws; ++draws) {
    const Vec2 p = draw();
    const double u = uniform();
    if (domain.point_in_obstacle(p)) continue;
    const double ratio = peak > 0.0 ? std::min(1.0, field.scaled_intensity(p) / peak) : 0.0;
    if (u >= config.base_rate + (1.0 - config.base_rate) * ratio) continue;
    dedupe.add(out, p, VertexClass::Free);
    ++accepted;
  }
  return out;
}

// Quadtree over triangle bounding boxes. Leaves keep ascending triangle indices.
class SpatialGrid::Locator {
 public:
  Locator(std::span<const Vec2> pts, std::span<const Triangle> tris) : pts_(pts), tris_(tris) {
    boxes_.reserve(tris.size());
    for (const Triangle& t : tris) {
      const std::array<Vec2, 3> v{pts[t[0]], pts[t[1]], pts[t[2]]};
      boxes_.push_back(box_of(v));
    }
    std::vector<std::uint32_t> all(tris.size());
    for (std::uint32_t i = 0; i < all.size(); ++i) all[i] = i;
    root_box_ = box_of(pts);
    nodes_.push_back({root_box_});
    build(0, std::move(all), 0);
  }

  bool contains(std::size_t ti, Vec2 p) const {
    const Triangle& t = tris_[ti];
    const Vec2 a = pts_[t[0]], b = pts_[t[1]], c = pts_[t[2]];
    return predicates::orient2d(a, b, p) >= 0 && predicates::orient2d(b, c, p) >= 0 &&
           predicates::orient2d(c, a, p) >= 0;
  }

  std::optional<std::size_t> locate(Vec2 p) const {
    if (!root_box_.contains(p)) return std::nullopt;
    std::size_t ni = 0;
    while (nodes_[ni].child != 0) {
      const Node& n = nodes_[ni];
      const Vec2 mid = (n.box.min + n.box.max) * 0.5;
      ni = n.child + (p.x >= mid.x ? 1 : 0) + (p.y >= mid.y ? 2 : 0);
    }
    const Node& leaf = nodes_[ni];
    for (std::size_t k = leaf.first; k < leaf.first + leaf.count; ++k) {
      const std::uint32_t ti = items_[k];
      if (boxes_[ti].contains(p) && contains(ti, p)) return ti;
    }
    return std::nullopt;
  }

 private:
  struct Node {
    Rect box;
    std::size_t child = 0;  // first of four children; 0 for a leaf
    std::size_t first = 0;
    std::size_t count = 0;
  };

  static constexpr std::size_t kLeafSize = 8;
  static constexpr int kMaxDepth = 24;

  static bool overlaps(const Rect& r, const Rect& s) {
    return r.min.x <= s.max.x && s.min.x <= r.max.x && r.min.y <= s.max.y && s.min.y <= r.max.y;
  }

  void build(std::size_t ni, std::vector<std::uint32_t> items, int depth) {
    const Rect box = nodes_[ni].box;
    if (items.size() > kLeafSize && depth < kMaxDepth) {
      const Vec2 mid = (box.min + box.max) * 0.5;
      std::array<Rect, 4> quads{Rect{box.min, mid}, Rect{{mid.x, box.min.y}, {box.max.x, mid.y}},
                                Rect{{box.min.x, mid.y}, {mid.x, box.max.y}},
                                Rect{mid, box.max}};
      std::array<std::vector<std::uint32_t>, 4> parts;
      std::size_t largest = 0, total = 0;
      for (int q = 0; q < 4; ++q) {
        for (std::uint32_t ti : items) {
          if (overlaps(boxes_[ti], quads[q])) parts[q].push_back(ti);
        }
        largest = std::max(largest, parts[q].size());
        total += parts[q].size();
      }
      // Triangles straddling the midpoint land in every child; stop once
      // splitting mostly copies them.
      if (largest < items.size() && total <= 2 * items.size()) {
        const std::size_t child = nodes_.size();
        nodes_[ni].child = child;
        for (int q = 0; q < 4; ++q) nodes_.push_back({quads[q]});
        items.clear();
        items.shrink_to_fit();
        for (int q = 0; q < 4; ++q) build(child + q, std::move(parts[q]), depth + 1);
        return;
      }
    }
    nodes_[ni].first = items_.size();
    nodes_[ni].count = items.size();
    items_.insert(items_.end(), items.begin(), items.end());
  }

  std::span<const Vec2> pts_;
  std::span<const Triangle> tris_;
  std::vector<Rect> boxes_;
  Rect root_box_;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> items_;
};

// Uniform bucket grid for nearest-vertex queries.
class SpatialGrid::NearestIndex {
 public:
  explicit NearestIndex(std::span<const Vec2> pts) : pts_(pts) {
    box_ = box_of(pts);
    const double area = std::max(box_.width() * box_.height(), 1e-300);
    cell_ = std::sqrt(area / static_cast<double>(pts.size())) * 1.5;
    if (!(cell_ > 0.0)) cell_ = 1.0;
    nx_ = static_cast<std::size_t>(box_.width() / cell_) + 1;
    ny_ = static_cast<std::size_t>(box_.height() / cell_) + 1;
    start_.assign(nx_ * ny_ + 1, 0);
    for (Vec2 p : pts) ++start_[bucket(p) + 1];
    for (std::size_t i = 1; i < start_.size(); ++i) start_[i] += start_[i - 1];
    items_.resize(pts.size());
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < pts.size(); ++i) items_[fill[bucket(pts[i])]++] = i;
  }

  std::pair<std::size_t, double> nearest(Vec2 p) const {
    const auto cx = clamp_cell((p.x - box_.min.x) / cell_, nx_);
    const auto cy = clamp_cell((p.y - box_.min.y) / cell_, ny_);
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t ring = 0;; ++ring) {
      const std::int64_t r = static_cast<std::int64_t>(ring);
      bool any_cell = false;
      for (std::int64_t ix = cx - r; ix <= cx + r; ++ix) {
        for (std::int64_t iy = cy - r; iy <= cy + r; ++iy) {
          if (std::max(std::abs(ix - cx), std::abs(iy - cy)) != r) continue;
          if (ix < 0 || iy < 0 || ix >= static_cast<std::int64_t>(nx_) ||
              iy >= static_cast<std::int64_t>(ny_)) {
            continue;
          }
          any_cell = true;
          const std::size_t b = static_cast<std::size_t>(iy) * nx_ + static_cast<std::size_t>(ix);
          for (std::size_t k = start_[b]; k < start_[b + 1]; ++k) {
            const double d2 = squared_distance(pts_[items_[k]], p);
            if (d2 < best_d2 || (d2 == best_d2 && items_[k] < best)) {
              best_d2 = d2;
              best = items_[k];
            }
          }
        }
      }
      // Everything beyond this ring is at least ring * cell_ away.
      const double reach = static_cast<double>(ring) * cell_;
      if (best_d2 < std::numeric_limits<double>::infinity() && reach * reach >= best_d2) break;
      if (!any_cell && best_d2 < std::numeric_limits<double>::infinity()) break;
      if (ring > nx_ + ny_ + 2) break;
    }
    return {best, std::sqrt(best_d2)};
  }

 private:
  static std::int64_t clamp_cell(double v, std::size_t n) {
    const auto c = static_cast<std::int64_t>(std::floor(v));
    return std::clamp<std::int64_t>(c, 0, static_cast<std::int64_t>(n) - 1);
  }
  std::size_t bucket(Vec2 p) const {
    const auto cx = static_cast<std::size_t>(clamp_cell((p.x - box_.min.x) / cell_, nx_));
    const auto cy = static_cast<std::size_t>(clamp_cell((p.y - box_.min.y) / cell_, ny_));
    return cy * nx_ + cx;
  }

  std::span<const Vec2> pts_;
  Rect box_;
  double cell_;
  std::size_t nx_, ny_;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> items_;
};

SpatialGrid::SpatialGrid(GridVertices vertices, std::vector<Triangle> triangles, double delta_p)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)), delta_p_(delta_p) {
  const std::size_t n = vertices_.points.size();
  if (vertices_.classes.size() != n) throw ValidationError("vertex class count mismatch");
  if (triangles_.empty()) throw ValidationError("grid has no triangles");
  std::size_t goals = 0;
  for (VertexClass c : vertices_.classes) goals += c == VertexClass::Goal ? 1 : 0;
  if (goals != 1 || vertices_.goal_index >= n ||
      vertices_.classes[vertices_.goal_index] != VertexClass::Goal) {
    throw ValidationError("grid must contain exactly one goal vertex");
  }
  std::vector<bool> used(n, false);
  for (const Triangle& t : triangles_) {
    for (std::uint32_t v : t) {
      if (v >= n) throw ValidationError("triangle references a missing vertex");
      used[v] = true;
    }
  }
  if (std::find(used.begin(), used.end(), false) != used.end()) {
    throw ValidationError("every vertex must belong to a triangle");
  }
  locator_ = std::make_unique<Locator>(vertices_.points, triangles_);
  nearest_ = std::make_unique<NearestIndex>(vertices_.points);
}

SpatialGrid::~SpatialGrid() = default;
SpatialGrid::SpatialGrid(SpatialGrid&&) noexcept = default;
SpatialGrid& SpatialGrid::operator=(SpatialGrid&&) noexcept = default;

std::optional<std::size_t> SpatialGrid::locate(Vec2 p) const { return locator_->locate(p); }

std::optional<Barycentric> SpatialGrid::barycentric(Vec2 p) const {
  const auto ti = locate(p);
  if (!ti) return std::nullopt;
  const Triangle& t = triangles_[*ti];
  const Vec2 a = vertices_.points[t[0]], b = vertices_.points[t[1]], c = vertices_.points[t[2]];
  const double area = cross(b - a, c - a);
  std::array<double, 3> w{cross(b - p, c - p) / area, cross(c - p, a - p) / area,
                          cross(a - p, b - p) / area};
  double sum = 0.0;
  for (double& x : w) {
    x = std::max(0.0, x);
    sum += x;
  }
  if (sum > 0.0) {
    for (double& x : w) x /= sum;
  } else {
    w = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  }
  return Barycentric{*ti, t, w};
}

double SpatialGrid::interpolate(std::span<const double> values, Vec2 p) const {
  const auto bc = barycentric(p);
  if (!bc) return 1.0;
  const auto& [v0, v1, v2] = bc->vertices;
  const double r = bc->weights[0] * values[v0] + bc->weights[1] * values[v1] +
                   bc->weights[2] * values[v2];
  const double lo = std::min({values[v0], values[v1], values[v2]});
  const double hi = std::max({values[v0], values[v1], values[v2]});
  return std::clamp(r, lo, hi);
}

std::size_t SpatialGrid::nearest_vertex(Vec2 p) const { return nearest_->nearest(p).first; }

double estimate_delta_p(const SpatialGrid& grid, const Domain& domain, int resolution) {
  const Rect& b = domain.bounds();
  double worst = 0.0;
  for (int i = 0; i < resolution; ++i) {
    const double x = b.min.x + b.width() * (i + 0.5) / resolution;
    for (int j = 0; j < resolution; ++j) {
      const Vec2 p{x, b.min.y + b.height() * (j + 0.5) / resolution};
      if (domain.point_in_obstacle(p)) continue;
      worst = std::max(worst, grid.nearest_->nearest(p).second);
    }
  }
  return worst;
}

SpatialGrid triangulate(GridVertices vertices, const Domain& domain) {
  std::vector<Triangle> tris = delaunay_triangulate(vertices.points);
  SpatialGrid grid(std::move(vertices), std::move(tris), 0.0);
  grid.delta_p_ = estimate_delta_p(grid, domain);
  return grid;
}

SpatialGrid build_grid(const Domain& domain, const IntensityField& field, Vec2 goal,
                       std::span<const Vec2> sources, const GridConfig& config) {
  return triangulate(sample_grid(domain, field, goal, sources, config), domain);
}

}  // namespace mep
