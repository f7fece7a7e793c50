#pragma once

#include "mep/vec2.hpp"

namespace mep::predicates {

// Exact-sign geometric predicates. A floating-point filter answers almost all
// queries; undecided cases are recomputed in rational arithmetic.

/// +1 if a, b, c turn counterclockwise, -1 if clockwise, 0 if collinear.
int orient2d(Vec2 a, Vec2 b, Vec2 c);

/// +1 if d lies strictly inside the circle through counterclockwise a, b, c;
/// -1 if strictly outside; 0 if cocircular.
int incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

/// True if p lies on the closed segment ab (exact).
bool on_segment(Vec2 a, Vec2 b, Vec2 p);

/// True if closed segments ab and cd share at least one point (exact).
bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

}  // namespace mep::predicates
