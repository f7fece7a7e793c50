#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "mep/vec2.hpp"

namespace mep {

using Triangle = std::array<std::uint32_t, 3>;

/// Delaunay triangulation of distinct points (incremental Bowyer-Watson with
/// ghost triangles and exact predicates). Triangles are counterclockwise and
/// cover the convex hull. Cocircular ties keep the existing triangles, so the
/// output depends only on the input order. Throws DegenerateInput if fewer than
/// three points, duplicates, or all points collinear.
std::vector<Triangle> delaunay_triangulate(std::span<const Vec2> points);

}  // namespace mep
