#include "doctest.h"
#include "mep/domain.hpp"
#include "mep/errors.hpp"

using namespace mep;

namespace {
const Polygon kSquare{{4, 4}, {6, 4}, {6, 6}, {4, 6}};
}

TEST_CASE("domain validation") {
  CHECK_THROWS_AS(Domain(Rect{{0, 0}, {0, 10}}), ValidationError);
  CHECK_THROWS_AS(Domain(Rect{{0, 0}, {10, 10}}, {{{1, 1}, {2, 2}}}), ValidationError);
  CHECK_THROWS_AS(Domain(Rect{{0, 0}, {10, 10}}, {{{1, 1}, {12, 1}, {5, 5}}}), ValidationError);
  // Clockwise.
  CHECK_THROWS_AS(Domain(Rect{{0, 0}, {10, 10}}, {{{4, 4}, {4, 6}, {6, 6}, {6, 4}}}),
                  ValidationError);
  // Bow tie.
  CHECK_THROWS_AS(Domain(Rect{{0, 0}, {10, 10}}, {{{4, 4}, {6, 6}, {6, 4}, {4, 6}}}),
                  ValidationError);
  CHECK_NOTHROW(Domain(Rect{{0, 0}, {10, 10}}, {kSquare}));
}

TEST_CASE("point in obstacle excludes the boundary") {
  const Domain d(Rect{{0, 0}, {10, 10}}, {kSquare});
  CHECK(d.point_in_obstacle({5, 5}));
  CHECK_FALSE(d.point_in_obstacle({4, 5}));
  CHECK_FALSE(d.point_in_obstacle({4, 4}));
  CHECK_FALSE(d.point_in_obstacle({3.99, 5}));
  CHECK_FALSE(d.point_in_obstacle({7, 5}));
}

TEST_CASE("point in a concave obstacle") {
  // U shape opening upwards.
  const Polygon u{{2, 2}, {8, 2}, {8, 8}, {6, 8}, {6, 4}, {4, 4}, {4, 8}, {2, 8}};
  const Domain d(Rect{{0, 0}, {10, 10}}, {u});
  CHECK(d.point_in_obstacle({3, 5}));
  CHECK(d.point_in_obstacle({7, 5}));
  CHECK(d.point_in_obstacle({5, 3}));
  CHECK_FALSE(d.point_in_obstacle({5, 6}));
  CHECK_FALSE(d.point_in_obstacle({5, 4}));
  CHECK(d.point_in_obstacle({3, 4}));  // ray passes through the notch vertex level
}

TEST_CASE("segment clearance") {
  const Domain d(Rect{{0, 0}, {10, 10}}, {kSquare});
  CHECK(d.segment_clear({0, 0}, {10, 0}));
  CHECK_FALSE(d.segment_clear({0, 5}, {10, 5}));
  CHECK_FALSE(d.segment_clear({0, 4}, {10, 4}));      // grazing an edge counts as a hit
  CHECK_FALSE(d.segment_clear({3, 3}, {4, 4}));       // touching a corner
  CHECK_FALSE(d.segment_clear({5, 5}, {5.5, 5.5}));   // entirely inside
  CHECK_FALSE(d.segment_clear({9, 9}, {11, 9}));      // leaves the bounds
  CHECK(d.segment_clear({0, 10}, {10, 10}));
  CHECK(d.segment_clear({2, 2}, {2, 2}));
}
