#include <cmath>
#include <functional>
#include <random>

#include "doctest.h"
#include "mep/errors.hpp"
#include "mep/path.hpp"

using namespace mep;

namespace {

IntensityField constant_field(double c) {
  return IntensityField({{{1e6, 1e6}, BooleanDisk{1e-6, 0.0}}}, IntensityMode::MaxSensor, 1.0, c);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int depth = 0) {
  const double m = 0.5 * (a + b);
  const double whole = (b - a) / 6.0 * (f(a) + 4 * f(m) + f(b));
  const double left = (m - a) / 6.0 * (f(a) + 4 * f(0.5 * (a + m)) + f(m));
  const double right = (b - m) / 6.0 * (f(m) + 4 * f(0.5 * (m + b)) + f(b));
  if (depth > 40 || std::abs(left + right - whole) < 15 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive_simpson(f, a, m, tol / 2, depth + 1) + adaptive_simpson(f, m, b, tol / 2, depth + 1);
}

struct Solved {
  Domain domain;
  IntensityField field;
  SolverConfig config;
  SpatialGrid grid;
  ValueField value;
};

Solved solved(Domain domain, IntensityField field, Vec2 goal, std::vector<Vec2> sources,
              int points_per_node = 1000) {
  GridConfig gc;
  gc.points_per_node = points_per_node;
  SolverConfig cfg;
  SpatialGrid grid = build_grid(domain, field, goal, sources, gc);
  ValueField value = solve(domain, field, grid, cfg);
  Solved s{std::move(domain), std::move(field), cfg, std::move(grid), {}};
  s.value = std::move(value);
  s.value.grid = &s.grid;
  return s;
}

}  // namespace

TEST_CASE("trapezoid is exact for constant and linear integrands") {
  const auto constant = [](Vec2) { return 2.5; };
  CHECK(trapezoid(constant, {3, 4}, {3, 10}, 0.37) == doctest::Approx(2.5 * 6).epsilon(1e-13));
  // Far from a boolean disk the raw intensity is zero regardless of the floor.
  const Path p{{{0, 0}, {3, 4}, {3, 10}}, 0.1};
  CHECK(evaluate_exposure(constant_field(2.5), p, 0.37) == 0.0);
  const auto linear = [](Vec2 q) { return 1.0 + 2.0 * q.x - 0.5 * q.y; };
  // Exact integral of the linear profile along (0,0)-(3,4): length 5, mean value at the midpoint.
  CHECK(trapezoid(linear, {0, 0}, {3, 4}, 0.7) == doctest::Approx(5 * linear({1.5, 2})).epsilon(1e-13));
  CHECK(trapezoid(linear, {0, 0}, {0, 0}, 0.1) == 0.0);
}

TEST_CASE("exposure of a straight segment matches adaptive quadrature") {
  const IntensityField f({{{5, 6}, AttenuatedDisk{4, 2}}}, IntensityMode::MaxSensor);
  const Vec2 a{0, 5}, b{10, 5};
  const double oracle = adaptive_simpson(
      [&](double t) { return f.intensity(a + (b - a) * (t / 10.0)); }, 0.0, 10.0, 1e-12);
  // Closed form: integral of 4 / (x^2 + 1) over [-5, 5].
  CHECK(oracle == doctest::Approx(8.0 * std::atan(5.0)).epsilon(1e-10));
  const double ours = segment_exposure(f, a, b, 1e-3 * 10.0);
  CHECK(std::abs(ours - oracle) / oracle < 1e-4);
}

TEST_CASE("exposure is additive over concatenation") {
  const IntensityField f({{{5, 6}, AttenuatedDisk{4, 2}}, {{2, 2}, ProbabilityExp{1, 1}}},
                         IntensityMode::AllSensor);
  const Path p1{{{0, 0}, {2, 3}, {4, 4.5}}, 0.1};
  const Path p2{{{4, 4.5}, {7, 5}, {10, 10}}, 0.1};
  Path joined = p1;
  joined.waypoints.insert(joined.waypoints.end(), p2.waypoints.begin() + 1, p2.waypoints.end());
  const double h = 0.01;
  const double sum = evaluate_exposure(f, p1, h) + evaluate_exposure(f, p2, h);
  CHECK(evaluate_exposure(f, joined, h) == doctest::Approx(sum).epsilon(1e-10));
  CHECK(evaluate_exposure(f, joined, h) >= 0.0);
}

TEST_CASE("local optimization never increases exposure") {
  const Domain d(Rect{{0, 0}, {10, 10}}, {{{6, 1}, {8, 1}, {8, 3}, {6, 3}}});
  const IntensityField f({{{5, 5}, AttenuatedDisk{4, 2}}, {{3, 7}, NoisyProbability{}}},
                         IntensityMode::AllSensor);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-0.04, 0.04);
  for (int trial = 0; trial < 10; ++trial) {
    Path p{{}, 0.1};
    for (int k = 0; k <= 100; ++k) p.waypoints.push_back({0.1 * k, 5.0 + (k && k < 100 ? u(rng) : 0.0)});
    const double before = evaluate_exposure(f, p, 0.01);
    OptimizerConfig oc;
    oc.seed = static_cast<std::uint64_t>(trial);
    const Path q = local_optimize(f, d, p, 1.0, 0.01, oc);
    CHECK(evaluate_exposure(f, q, 0.01) <= before);
    CHECK(q.waypoints.front() == p.waypoints.front());
    CHECK(q.waypoints.back() == p.waypoints.back());
    for (std::size_t i = 1; i < q.waypoints.size(); ++i) {
      CHECK(d.segment_clear(q.waypoints[i - 1], q.waypoints[i]));
    }
  }
}

TEST_CASE("local optimization moves a path off the sensor peak") {
  const Domain d(Rect{{0, 0}, {10, 10}});
  const IntensityField f({{{5, 5.02}, AttenuatedDisk{4, 2}}}, IntensityMode::MaxSensor);
  Path p{{}, 0.1};
  for (int k = 0; k <= 100; ++k) p.waypoints.push_back({0.1 * k, 5.0});
  const double before = evaluate_exposure(f, p, 0.01);
  const double after = evaluate_exposure(f, local_optimize(f, d, p, 1.0, 0.01), 0.01);
  CHECK(after < before);
}

TEST_CASE("local optimization leaves optimal and trivial paths alone") {
  const Domain d(Rect{{0, 0}, {10, 10}});
  const IntensityField f = constant_field(1.0);
  Path straight{{}, 0.1};
  for (int k = 0; k <= 50; ++k) straight.waypoints.push_back({0.1 * k + 1.0, 0.1 * k + 1.0});
  CHECK(local_optimize(f, d, straight, 1.0, 0.01).waypoints == straight.waypoints);
  const Path two{{{1, 1}, {2, 2}}, 0.1};
  CHECK(local_optimize(f, d, two, 1.0, 0.01).waypoints == two.waypoints);
}

TEST_CASE("extracting from the goal itself") {
  auto s = solved(Domain(Rect{{0, 0}, {10, 10}}), constant_field(1e-3), {10, 5}, {{0, 5}}, 200);
  const Path p = extract_path(s.value, s.field, s.domain, {10, 5}, {10, 5}, s.config);
  REQUIRE(p.waypoints.size() == 2);
  CHECK(evaluate_exposure(s.field, p, 0.01) == doctest::Approx(0.0));
}

TEST_CASE("constant intensity gives a nearly straight path") {
  auto s = solved(Domain(Rect{{0, 0}, {10, 10}}), constant_field(1e-3), {10, 6.5}, {{0, 4}});
  const Path p = extract_path(s.value, s.field, s.domain, {0, 4}, {10, 6.5}, s.config);
  CHECK(p.waypoints.front() == Vec2{0, 4});
  CHECK(p.waypoints.back() == Vec2{10, 6.5});
  const double straight = distance({0, 4}, {10, 6.5});
  CHECK(p.length() <= 1.05 * straight);
  for (std::size_t i = 1; i < p.waypoints.size(); ++i) {
    CHECK(s.domain.segment_clear(p.waypoints[i - 1], p.waypoints[i]));
  }
}

TEST_CASE("the path exposure is bounded below by the value function") {
  const Domain d(Rect{{0, 0}, {10, 10}}, {{{4, 2}, {6, 2}, {6, 6}, {4, 6}}});
  const IntensityField f({{{3, 7}, AttenuatedDisk{4, 2}}, {{7, 4}, AttenuatedDisk{4, 2}}},
                         IntensityMode::MaxSensor);
  auto s = solved(d, f, {10, 5}, {{0, 4}});
  const Path p = extract_path(s.value, s.field, s.domain, {0, 4}, {10, 5}, s.config);
  const double scaled = evaluate_exposure(s.field, p, 0.01) / s.field.omega();
  const double v = recover_value(s.value.vbar[s.grid.source_indices()[0]]);
  CHECK(scaled >= 0.9 * v);
  for (std::size_t i = 1; i < p.waypoints.size(); ++i) {
    CHECK(s.domain.segment_clear(p.waypoints[i - 1], p.waypoints[i]));
  }
}

TEST_CASE("an enclosed source is unreachable") {
  const std::vector<Polygon> walls{{{2.5, 2.5}, {7.5, 2.5}, {7.5, 3}, {2.5, 3}},
                                   {{7, 2.5}, {7.5, 2.5}, {7.5, 7.5}, {7, 7.5}},
                                   {{2.5, 7}, {7.5, 7}, {7.5, 7.5}, {2.5, 7.5}},
                                   {{2.5, 2.5}, {3, 2.5}, {3, 7.5}, {2.5, 7.5}}};
  const Domain d(Rect{{0, 0}, {10, 10}}, walls);
  const IntensityField f({{{1, 1}, AttenuatedDisk{4, 2}}}, IntensityMode::MaxSensor);
  auto s = solved(d, f, {9, 9}, {{5, 5}}, 300);
  CHECK_THROWS_AS(extract_path(s.value, s.field, s.domain, {5, 5}, {9, 9}, s.config), Unreachable);
}

TEST_CASE("replanning reuses the value field") {
  auto s = solved(Domain(Rect{{0, 0}, {10, 10}}),
                  IntensityField({{{5, 5}, AttenuatedDisk{4, 2}}}, IntensityMode::MaxSensor),
                  {10, 5}, {{0, 5}, {0, 1}}, 300);
  const auto calls = solve_invocations();
  (void)extract_path(s.value, s.field, s.domain, {0, 5}, {10, 5}, s.config);
  (void)extract_path(s.value, s.field, s.domain, {0, 1}, {10, 5}, s.config);
  CHECK(solve_invocations() == calls);
}
