#include <algorithm>
#include <random>

#include "doctest.h"
#include "mep/errors.hpp"
#include "mep/grid.hpp"
#include "mep/predicates.hpp"

using namespace mep;

namespace {

IntensityField single_node(Vec2 at = {5, 5}) {
  return IntensityField({{at, AttenuatedDisk{4.0, 2.0}}}, IntensityMode::MaxSensor);
}

GridVertices square_with_centre() {
  GridVertices v;
  v.points = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}};
  v.classes = {VertexClass::Goal, VertexClass::DomainBoundary, VertexClass::DomainBoundary,
               VertexClass::DomainBoundary, VertexClass::Free};
  v.goal_index = 0;
  return v;
}

}  // namespace

TEST_CASE("sampling keeps goal, sources and boundary rings") {
  const Domain d(Rect{{0, 0}, {10, 10}}, {{{4, 4}, {6, 4}, {6, 6}, {4, 6}}});
  const std::vector<Vec2> sources{{0, 4}, {1, 1}};
  GridConfig cfg;
  cfg.points_per_node = 50;
  const GridVertices v = sample_grid(d, single_node({2, 8}), {10, 6.5}, sources, cfg);
  REQUIRE(v.points.size() == v.classes.size());
  CHECK(v.points[v.goal_index] == Vec2{10, 6.5});
  CHECK(v.classes[v.goal_index] == VertexClass::Goal);
  CHECK(std::count(v.classes.begin(), v.classes.end(), VertexClass::Goal) == 1);
  REQUIRE(v.source_indices.size() == 2);
  CHECK(v.points[v.source_indices[0]] == Vec2{0, 4});
  CHECK(v.points[v.source_indices[1]] == Vec2{1, 1});
  for (Vec2 c : {Vec2{0, 0}, Vec2{10, 0}, Vec2{10, 10}, Vec2{0, 10}}) {
    CHECK(std::find(v.points.begin(), v.points.end(), c) != v.points.end());
  }
  std::size_t obstacle = 0;
  for (std::size_t i = 0; i < v.points.size(); ++i) {
    CHECK_FALSE(d.point_in_obstacle(v.points[i]));
    if (v.classes[i] == VertexClass::Obstacle) ++obstacle;
  }
  CHECK(obstacle == 16);  // perimeter 8 at spacing 0.5
  // Pairwise separation above the dedupe tolerance.
  for (std::size_t i = 0; i < v.points.size(); ++i) {
    for (std::size_t j = i + 1; j < v.points.size(); ++j) {
      REQUIRE(distance(v.points[i], v.points[j]) > 1e-9 * d.diameter());
    }
  }
}

TEST_CASE("a source on the domain boundary keeps its vertex") {
  const Domain d(Rect{{0, 0}, {10, 10}});
  const std::vector<Vec2> sources{{0, 5}};
  const GridVertices v = sample_grid(d, single_node(), {10, 5}, sources, GridConfig{});
  CHECK(v.points[v.source_indices[0]] == Vec2{0, 5});
  CHECK(v.classes[v.goal_index] == VertexClass::Goal);
}

TEST_CASE("sampling is deterministic in the seed") {
  const Domain d(Rect{{0, 0}, {10, 10}});
  const std::vector<Vec2> sources{{0, 5}};
  GridConfig cfg;
  const auto a = sample_grid(d, single_node(), {10, 5}, sources, cfg);
  const auto b = sample_grid(d, single_node(), {10, 5}, sources, cfg);
  CHECK(a.points == b.points);
  cfg.rng_seed = 2;
  const auto c = sample_grid(d, single_node(), {10, 5}, sources, cfg);
  CHECK(a.points != c.points);
}

TEST_CASE("sampling concentrates vertices near the node") {
  const Domain d(Rect{{0, 0}, {10, 10}});
  const std::vector<Vec2> sources{{0, 5}};
  GridConfig cfg;
  cfg.points_per_node = 3000;
  const auto v = sample_grid(d, single_node(), {10, 5}, sources, cfg);
  std::size_t near = 0, far = 0;
  for (std::size_t i = 0; i < v.points.size(); ++i) {
    if (v.classes[i] != VertexClass::Free) continue;
    const double r = distance(v.points[i], {5, 5});
    if (r <= 1.0) ++near;
    // Same-area annulus well away from the node.
    if (r >= 4.0 && r <= std::sqrt(17.0)) ++far;
  }
  CHECK(near >= 2 * far);
}

TEST_CASE("goal or source inside an obstacle is rejected") {
  const Domain d(Rect{{0, 0}, {10, 10}}, {{{4, 4}, {6, 4}, {6, 6}, {4, 6}}});
  const std::vector<Vec2> ok{{0, 0}};
  const std::vector<Vec2> bad{{1, 1}, {5, 5}};
  CHECK_THROWS_AS(sample_grid(d, single_node(), {5, 5}, ok, GridConfig{}), GoalInObstacle);
  CHECK_THROWS_AS(sample_grid(d, single_node(), {9, 9}, bad, GridConfig{}), SourceInObstacle);
}

TEST_CASE("point location and interpolation on the square with centre") {
  const Domain d(Rect{{0, 0}, {1, 1}});
  const SpatialGrid g = triangulate(square_with_centre(), d);
  CHECK(g.triangles().size() == 4);
  CHECK(g.goal_index() == 0);

  // Linear data is reproduced exactly.
  std::vector<double> f;
  for (Vec2 p : g.vertices()) f.push_back(0.2 + 0.3 * p.x + 0.4 * p.y);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const Vec2 p{u(rng), u(rng)};
    CHECK(g.interpolate(f, p) == doctest::Approx(0.2 + 0.3 * p.x + 0.4 * p.y).epsilon(1e-12));
  }
  // Vertices interpolate to their own value.
  for (std::size_t i = 0; i < g.vertex_count(); ++i) {
    CHECK(g.interpolate(f, g.vertices()[i]) == doctest::Approx(f[i]).epsilon(1e-14));
  }
  CHECK(g.interpolate(f, {1.5, 0.5}) == 1.0);
  CHECK_FALSE(g.locate({-0.1, 0.5}).has_value());
}

TEST_CASE("located triangle is the lowest-index container") {
  const Domain d(Rect{{0, 0}, {10, 10}});
  const std::vector<Vec2> sources{{0, 5}};
  GridConfig cfg;
  cfg.points_per_node = 300;
  const SpatialGrid g = build_grid(d, single_node(), {10, 5}, sources, cfg);
  const auto pts = g.vertices();
  const auto tris = g.triangles();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<Vec2> queries;
  for (int k = 0; k < 300; ++k) queries.push_back({u(rng), u(rng)});
  // Vertices and edge midpoints are shared by several triangles.
  for (std::size_t t = 0; t < 50; ++t) {
    queries.push_back(pts[tris[t][0]]);
    queries.push_back((pts[tris[t][0]] + pts[tris[t][1]]) * 0.5);
  }
  for (Vec2 q : queries) {
    std::optional<std::size_t> brute;
    for (std::size_t t = 0; t < tris.size() && !brute; ++t) {
      const Vec2 a = pts[tris[t][0]], b = pts[tris[t][1]], c = pts[tris[t][2]];
      if (predicates::orient2d(a, b, q) >= 0 && predicates::orient2d(b, c, q) >= 0 &&
          predicates::orient2d(c, a, q) >= 0) {
        brute = t;
      }
    }
    REQUIRE(brute.has_value());
    CHECK(g.locate(q) == brute);
    const auto bc = g.barycentric(q);
    REQUIRE(bc.has_value());
    double sum = 0.0;
    Vec2 r{0, 0};
    for (int k = 0; k < 3; ++k) {
      CHECK(bc->weights[k] >= 0.0);
      sum += bc->weights[k];
      r += pts[bc->vertices[k]] * bc->weights[k];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(distance(r, q) < 1e-9);
  }
}

TEST_CASE("dense obstacle rings on sparse fields still index in bounded memory") {
  // Long fans of thin triangles off the box rings straddle every quadtree split.
  const auto box = [](double x0, double y0, double x1, double y1) {
    return Polygon{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  };
  const Domain d(Rect{{0, 0}, {10, 10}},
                 {box(4.4, 3.9, 5.4, 6.1), box(7.0, 2.7, 8.0, 4.3), box(2.1, 4.5, 2.8, 5.4),
                  box(6.3, 6.1, 7.2, 7.3), box(8.5, 6.2, 9.3, 7.3), box(5.6, 3.2, 6.4, 4.4),
                  box(1.1, 3.3, 1.9, 4.1)});
  const std::vector<Vec2> sources{{0, 4}};
  GridConfig cfg;
  cfg.points_per_node = 30;
  cfg.boundary_spacing = 0.1;
  const SpatialGrid g = build_grid(d, single_node(), {10, 6.5}, sources, cfg);
  for (Vec2 p : g.vertices()) CHECK(g.locate(p).has_value());
}

TEST_CASE("interpolants stay within the triangle's vertex values") {
  const Domain d(Rect{{0, 0}, {10, 10}});
  const std::vector<Vec2> sources{{0, 5}};
  const SpatialGrid g = build_grid(d, single_node(), {10, 5}, sources, GridConfig{});
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(g.vertex_count());
  for (double& x : v) x = u(rng);
  for (int k = 0; k < 500; ++k) {
    const Vec2 p{10 * u(rng), 10 * u(rng)};
    const auto bc = g.barycentric(p);
    REQUIRE(bc);
    const double lo = std::min({v[bc->vertices[0]], v[bc->vertices[1]], v[bc->vertices[2]]});
    const double hi = std::max({v[bc->vertices[0]], v[bc->vertices[1]], v[bc->vertices[2]]});
    const double r = g.interpolate(v, p);
    CHECK(r >= lo);
    CHECK(r <= hi);
  }
}

TEST_CASE("delta_p matches a brute-force nearest-vertex scan") {
  const Domain d(Rect{{0, 0}, {10, 10}}, {{{4, 4}, {6, 4}, {6, 6}, {4, 6}}});
  const std::vector<Vec2> sources{{0, 5}};
  GridConfig cfg;
  cfg.points_per_node = 200;
  const SpatialGrid g = build_grid(d, single_node({2, 2}), {10, 5}, sources, cfg);
  const int res = 64;
  double worst = 0.0;
  for (int i = 0; i < res; ++i) {
    for (int j = 0; j < res; ++j) {
      const Vec2 p{10.0 * (i + 0.5) / res, 10.0 * (j + 0.5) / res};
      if (d.point_in_obstacle(p)) continue;
      double best = 1e300;
      for (Vec2 q : g.vertices()) best = std::min(best, distance(p, q));
      worst = std::max(worst, best);
      CHECK(distance(g.vertices()[g.nearest_vertex(p)], p) == doctest::Approx(best));
    }
  }
  CHECK(estimate_delta_p(g, d, res) == doctest::Approx(worst));
  CHECK(g.delta_p() > 0.0);
  CHECK(g.delta_p() >= worst * 0.5);
}

TEST_CASE("grid invariants are checked on construction") {
  GridVertices v = square_with_centre();
  v.classes[1] = VertexClass::Goal;
  CHECK_THROWS_AS(SpatialGrid(v, delaunay_triangulate(v.points), 0.0), ValidationError);
}
