#include "mep/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "mep/errors.hpp"

namespace mep {
namespace {

constexpr std::array<std::array<int, 2>, 16> kOffsets{{{1, 0},  {0, 1},   {-1, 0}, {0, -1},
                                                       {1, 1},  {-1, 1},  {-1, -1}, {1, -1},
                                                       {2, 1},  {1, 2},   {-1, 2}, {-2, 1},
                                                       {-2, -1}, {-1, -2}, {1, -2}, {2, -1}}};

}  // namespace

OracleResult dijkstra_oracle(const Scenario& scenario, double h, std::size_t source_index) {
  if (!(h > 0.0)) throw ValidationError("lattice spacing must be > 0");
  const Domain domain = scenario.domain();
  const IntensityField field = scenario.field();
  const Rect& b = domain.bounds();
  const auto nx = static_cast<std::size_t>(std::llround(b.width() / h)) + 1;
  const auto ny = static_cast<std::size_t>(std::llround(b.height() / h)) + 1;
  if (nx < 2 || ny < 2) throw ValidationError("lattice spacing too coarse for the domain");
  const double hx = b.width() / static_cast<double>(nx - 1);
  const double hy = b.height() / static_cast<double>(ny - 1);
  const double quad = std::min(std::min(hx, hy) / 4.0, scenario.eval_resolution());

  const auto node_at = [&](std::size_t i, std::size_t j) {
    return Vec2{b.min.x + hx * static_cast<double>(i), b.min.y + hy * static_cast<double>(j)};
  };
  const std::size_t n = nx * ny;
  std::vector<std::uint8_t> free(n);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) free[j * nx + i] = !domain.point_in_obstacle(node_at(i, j));
  }

  const Vec2 source = scenario.sources.at(source_index);
  const Vec2 goal = scenario.goal;

  // Nearest free lattice node joined to p by a clear segment.
  const auto snap = [&](Vec2 p) -> std::size_t {
    const auto ci = static_cast<std::int64_t>(std::llround((p.x - b.min.x) / hx));
    const auto cj = static_cast<std::int64_t>(std::llround((p.y - b.min.y) / hy));
    std::size_t best = n;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::int64_t r = 1; r <= 8 && best == n; ++r) {
      for (std::int64_t dj = -r; dj <= r; ++dj) {
        for (std::int64_t di = -r; di <= r; ++di) {
          const std::int64_t i = ci + di, j = cj + dj;
          if (i < 0 || j < 0 || i >= static_cast<std::int64_t>(nx) ||
              j >= static_cast<std::int64_t>(ny)) {
            continue;
          }
          const std::size_t k = static_cast<std::size_t>(j) * nx + static_cast<std::size_t>(i);
          const Vec2 q = node_at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
          const double d = distance(p, q);
          if (!free[k] || d >= best_d || !domain.segment_clear(p, q)) continue;
          best = k;
          best_d = d;
        }
      }
    }
    if (best == n) throw Unreachable("no visible lattice node near (" + std::to_string(p.x) +
                                     ", " + std::to_string(p.y) + ")");
    return best;
  };

  const std::size_t s = snap(source);
  const std::size_t t = snap(goal);
  const auto pos = [&](std::size_t k) { return node_at(k % nx, k / nx); };

  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> parent(n, n);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[s] = segment_exposure(field, source, pos(s), quad);
  heap.push({dist[s], s});
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    if (u == t) break;
    const auto ui = static_cast<std::int64_t>(u % nx), uj = static_cast<std::int64_t>(u / nx);
    const Vec2 pu = pos(u);
    for (const auto& off : kOffsets) {
      const std::int64_t vi = ui + off[0], vj = uj + off[1];
      if (vi < 0 || vj < 0 || vi >= static_cast<std::int64_t>(nx) ||
          vj >= static_cast<std::int64_t>(ny)) {
        continue;
      }
      const std::size_t v = static_cast<std::size_t>(vj) * nx + static_cast<std::size_t>(vi);
      if (!free[v]) continue;
      const Vec2 pv = pos(v);
      if (!domain.obstacles().empty() && !domain.segment_clear(pu, pv)) continue;
      const double nd = d + segment_exposure(field, pu, pv, quad);
      if (nd < dist[v]) {
        dist[v] = nd;
        parent[v] = u;
        heap.push({nd, v});
      }
    }
  }
  if (!std::isfinite(dist[t])) throw Unreachable("goal not reachable on the lattice");

  OracleResult out;
  out.exposure = dist[t] + segment_exposure(field, pos(t), goal, quad);
  out.path.push_back(goal);
  for (std::size_t k = t; k != n; k = parent[k]) out.path.push_back(pos(k));
  out.path.push_back(source);
  std::reverse(out.path.begin(), out.path.end());
  return out;
}

RichardsonEstimate richardson_oracle(const Scenario& scenario, double h, std::size_t source_index) {
  RichardsonEstimate r;
  for (int k = 0; k < 3; ++k) {
    r.h.push_back(h / std::pow(2.0, k));
    r.exposure.push_back(dijkstra_oracle(scenario, r.h.back(), source_index).exposure);
  }
  const double d1 = r.exposure[0] - r.exposure[1];
  const double d2 = r.exposure[1] - r.exposure[2];
  // Observed order when the differences shrink consistently; first order otherwise.
  r.order = (d1 != 0.0 && d2 != 0.0 && d1 / d2 > 1.0) ? std::log2(d1 / d2) : 1.0;
  r.limit = r.exposure[2] - d2 / (std::pow(2.0, r.order) - 1.0);
  return r;
}

}  // namespace mep
