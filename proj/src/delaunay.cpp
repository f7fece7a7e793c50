#include "mep/delaunay.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>
#include <string>

#include "mep/errors.hpp"
#include "mep/predicates.hpp"

namespace mep {
namespace {

using predicates::incircle;
using predicates::orient2d;

constexpr std::int32_t kGhost = -1;

// Edge slot i is opposite v[i]: it joins v[i+1] and v[i+2].
struct Tri {
  std::array<std::int32_t, 3> v;
  std::array<std::int32_t, 3> nbr{-1, -1, -1};
  bool alive = true;
};

std::uint64_t hilbert_index(std::uint32_t x, std::uint32_t y) {
  constexpr std::uint32_t n = 1u << 16;
  std::uint64_t d = 0;
  for (std::uint32_t s = n / 2; s > 0; s /= 2) {
    const std::uint32_t rx = (x & s) ? 1u : 0u;
    const std::uint32_t ry = (y & s) ? 1u : 0u;
    d += static_cast<std::uint64_t>(s) * s * ((3u * rx) ^ ry);
    if (ry == 0) {
      if (rx == 1) {
        x = n - 1 - x;
        y = n - 1 - y;
      }
      std::swap(x, y);
    }
  }
  return d;
}

class Builder {
 public:
  explicit Builder(std::span<const Vec2> pts) : pts_(pts) {}

  std::vector<Triangle> run();

 private:
  bool is_ghost(const Tri& t) const { return t.v[0] < 0 || t.v[1] < 0 || t.v[2] < 0; }
  Vec2 at(std::int32_t i) const { return pts_[static_cast<std::size_t>(i)]; }

  bool conflicts(std::int32_t ti, Vec2 p) const;
  std::int32_t locate(Vec2 p) const;
  void insert(std::int32_t index);
  std::int32_t add(std::int32_t a, std::int32_t b, std::int32_t c);

  std::span<const Vec2> pts_;
  std::vector<Tri> tris_;
  std::int32_t last_ = 0;

  // Scratch buffers reused across insertions.
  std::vector<std::int32_t> cavity_;
  std::vector<std::int32_t> stack_;
  std::vector<std::uint32_t> visit_;
  std::uint32_t epoch_ = 0;
};

std::int32_t Builder::add(std::int32_t a, std::int32_t b, std::int32_t c) {
  tris_.push_back(Tri{{a, b, c}});
  visit_.push_back(0);
  return static_cast<std::int32_t>(tris_.size() - 1);
}

bool Builder::conflicts(std::int32_t ti, Vec2 p) const {
  const Tri& t = tris_[static_cast<std::size_t>(ti)];
  if (!is_ghost(t)) return incircle(at(t.v[0]), at(t.v[1]), at(t.v[2]), p) > 0;
  // Ghost (a, b, G): hull edge a -> b with the exterior on its left. Its
  // "circumcircle" is the open exterior half-plane plus the open edge.
  int k = 0;
  while (t.v[k] != kGhost) ++k;
  const Vec2 a = at(t.v[(k + 1) % 3]);
  const Vec2 b = at(t.v[(k + 2) % 3]);
  const int o = orient2d(a, b, p);
  if (o > 0) return true;
  if (o < 0) return false;
  return dot(p - a, b - a) > 0.0 && dot(p - b, a - b) > 0.0;
}

std::int32_t Builder::locate(Vec2 p) const {
  std::int32_t ti = last_;
  const std::size_t limit = 4 * tris_.size() + 16;
  for (std::size_t step = 0; step < limit; ++step) {
    const Tri& t = tris_[static_cast<std::size_t>(ti)];
    if (is_ghost(t)) return ti;
    std::int32_t next = -1;
    for (int i = 0; i < 3; ++i) {
      if (orient2d(at(t.v[(i + 1) % 3]), at(t.v[(i + 2) % 3]), p) < 0) {
        next = t.nbr[i];
        break;
      }
    }
    if (next < 0) return ti;
    ti = next;
  }
  for (std::size_t i = 0; i < tris_.size(); ++i) {
    if (tris_[i].alive && conflicts(static_cast<std::int32_t>(i), p)) {
      return static_cast<std::int32_t>(i);
    }
  }
  throw DegenerateInput("point location failed during triangulation");
}

void Builder::insert(std::int32_t index) {
  const Vec2 p = at(index);
  const std::int32_t seed = locate(p);

  ++epoch_;
  cavity_.clear();
  stack_.clear();
  stack_.push_back(seed);
  visit_[static_cast<std::size_t>(seed)] = epoch_;
  while (!stack_.empty()) {
    const std::int32_t ti = stack_.back();
    stack_.pop_back();
    cavity_.push_back(ti);
    for (std::int32_t n : tris_[static_cast<std::size_t>(ti)].nbr) {
      if (visit_[static_cast<std::size_t>(n)] == epoch_) continue;
      if (conflicts(n, p)) {
        visit_[static_cast<std::size_t>(n)] = epoch_;
        stack_.push_back(n);
      }
    }
  }

  struct Fan {
    std::int32_t tri;
    std::int32_t u, w;
  };
  std::vector<Fan> fan;
  // Only conflicting triangles carry the current epoch.
  const auto in_cavity = [&](std::int32_t ti) {
    return visit_[static_cast<std::size_t>(ti)] == epoch_;
  };
  for (std::int32_t ti : cavity_) {
    const Tri t = tris_[static_cast<std::size_t>(ti)];
    for (int i = 0; i < 3; ++i) {
      const std::int32_t outside = t.nbr[i];
      if (in_cavity(outside)) continue;
      const std::int32_t u = t.v[(i + 1) % 3];
      const std::int32_t w = t.v[(i + 2) % 3];
      const std::int32_t nt = add(u, w, index);
      Tri& created = tris_[static_cast<std::size_t>(nt)];
      created.nbr[2] = outside;
      Tri& out = tris_[static_cast<std::size_t>(outside)];
      for (auto& slot : out.nbr) {
        if (slot == ti) slot = nt;
      }
      fan.push_back({nt, u, w});
      assert(u < 0 || w < 0 || orient2d(at(u), at(w), p) > 0);
    }
  }
  // The cavity boundary is a single cycle: each vertex starts one fan edge and ends one.
  for (const Fan& f : fan) {
    Tri& t = tris_[static_cast<std::size_t>(f.tri)];
    for (const Fan& g : fan) {
      if (g.u == f.w) t.nbr[0] = g.tri;
      if (g.w == f.u) t.nbr[1] = g.tri;
    }
  }
  for (std::int32_t ti : cavity_) tris_[static_cast<std::size_t>(ti)].alive = false;
  for (auto it = fan.rbegin(); it != fan.rend(); ++it) {
    if (!is_ghost(tris_[static_cast<std::size_t>(it->tri)])) {
      last_ = it->tri;
      break;
    }
  }
}

std::vector<Triangle> Builder::run() {
  const std::size_t n = pts_.size();
  if (n < 3) throw DegenerateInput("triangulation needs at least 3 points");
  {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return pts_[a].x != pts_[b].x ? pts_[a].x < pts_[b].x : pts_[a].y < pts_[b].y;
    });
    for (std::size_t i = 1; i < n; ++i) {
      if (pts_[order[i]] == pts_[order[i - 1]]) {
        throw DegenerateInput("duplicate point " + std::to_string(order[i]));
      }
    }
  }

  std::int32_t i0 = 0, i1 = 1, i2 = -1;
  for (std::size_t k = 2; k < n; ++k) {
    if (orient2d(pts_[0], pts_[1], pts_[k]) != 0) {
      i2 = static_cast<std::int32_t>(k);
      break;
    }
  }
  if (i2 < 0) throw DegenerateInput("all points are collinear");
  if (orient2d(at(i0), at(i1), at(i2)) < 0) std::swap(i1, i2);

  const std::int32_t solid = add(i0, i1, i2);
  const std::int32_t g01 = add(i1, i0, kGhost);
  const std::int32_t g12 = add(i2, i1, kGhost);
  const std::int32_t g20 = add(i0, i2, kGhost);
  tris_[solid].nbr = {g12, g20, g01};
  // Ghost (b, a, G): slot 2 faces the solid triangle; slots 0/1 face other ghosts.
  tris_[g01].nbr = {g20, g12, solid};
  tris_[g12].nbr = {g01, g20, solid};
  tris_[g20].nbr = {g12, g01, solid};
  last_ = solid;

  // Insert the rest along a Hilbert curve so walks stay short.
  double minx = pts_[0].x, maxx = minx, miny = pts_[0].y, maxy = miny;
  for (Vec2 p : pts_) {
    minx = std::min(minx, p.x);
    maxx = std::max(maxx, p.x);
    miny = std::min(miny, p.y);
    maxy = std::max(maxy, p.y);
  }
  const double span = std::max({maxx - minx, maxy - miny, 1e-300});
  std::vector<std::pair<std::uint64_t, std::int32_t>> rest;
  rest.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto ki = static_cast<std::int32_t>(k);
    if (ki == i0 || ki == i1 || ki == i2) continue;
    const auto hx = static_cast<std::uint32_t>((pts_[k].x - minx) / span * 65535.0);
    const auto hy = static_cast<std::uint32_t>((pts_[k].y - miny) / span * 65535.0);
    rest.emplace_back(hilbert_index(hx, hy), ki);
  }
  std::stable_sort(rest.begin(), rest.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  tris_.reserve(6 * n + 8);
  visit_.reserve(6 * n + 8);
  for (const auto& [key, idx] : rest) insert(idx);

  std::vector<Triangle> out;
  out.reserve(2 * n);
  for (const Tri& t : tris_) {
    if (!t.alive || is_ghost(t)) continue;
    out.push_back({static_cast<std::uint32_t>(t.v[0]), static_cast<std::uint32_t>(t.v[1]),
                   static_cast<std::uint32_t>(t.v[2])});
  }
  return out;
}

}  // namespace

std::vector<Triangle> delaunay_triangulate(std::span<const Vec2> points) {
  return Builder(points).run();
}

}  // namespace mep
