// Copyright 2026 The chord-layout Authors
// SPDX-License-Identifier: Apache-2.0

#include "chord/geometry.hpp"

#include "chord/rng.hpp"
#include "chord/scene.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace chord;

TEST_CASE("angle helpers wrap and measure the short way round") {
  CHECK(normalize_degrees(-90) == doctest::Approx(270));
  CHECK(normalize_degrees(720) == doctest::Approx(0));
  CHECK(normalize_degrees(359.5) == doctest::Approx(359.5));
  CHECK(angle_distance(10, 350) == doctest::Approx(20));
  CHECK(angle_distance(0, 180) == doctest::Approx(180));
  CHECK(angle_distance(-45, 45) == doctest::Approx(90));
  const Vec2 r = rotate({1, 0}, 90);
  CHECK(r.x == doctest::Approx(0).epsilon(1e-12));
  CHECK(r.y == doctest::Approx(1));
}

TEST_CASE("shoelace area and centroid of simple shapes") {
  const Polygon sq = {{0, 0}, {4, 0}, {4, 4}, {0, 4}};
  CHECK(signed_area(sq) == doctest::Approx(16));
  Polygon cw(sq.rbegin(), sq.rend());
  CHECK(signed_area(cw) == doctest::Approx(-16));
  const Vec2 c = centroid(sq);
  CHECK(c.x == doctest::Approx(2));
  CHECK(c.y == doctest::Approx(2));
  // L shape: a 4x1 bar under a 2x1 block; centroid by decomposition.
  const Polygon l = {{0, 0}, {4, 0}, {4, 1}, {2, 1}, {2, 2}, {0, 2}};
  CHECK(signed_area(l) == doctest::Approx(6));
  const Vec2 lc = centroid(l);
  CHECK(lc.x == doctest::Approx((4 * 2.0 + 2 * 1.0) / 6.0));
  CHECK(lc.y == doctest::Approx((4 * 0.5 + 2 * 1.5) / 6.0));
}

TEST_CASE("even-odd point test on a concave polygon") {
  const Polygon u = {{0, 0}, {3, 0}, {3, 3}, {2, 3}, {2, 1}, {1, 1}, {1, 3}, {0, 3}};
  CHECK(point_in_polygon({0.5, 2}, u));
  CHECK(point_in_polygon({2.5, 2}, u));
  CHECK(point_in_polygon({1.5, 0.5}, u));
  CHECK_FALSE(point_in_polygon({1.5, 2}, u));
  CHECK_FALSE(point_in_polygon({4, 1}, u));
}

TEST_CASE("segment distance and projection") {
  CHECK(point_segment_distance({1, 1}, {0, 0}, {2, 0}) == doctest::Approx(1));
  CHECK(point_segment_distance({3, 0}, {0, 0}, {2, 0}) == doctest::Approx(1));
  const Vec2 p = project_onto_segment({1, 5}, {0, 0}, {2, 0});
  CHECK(p.x == doctest::Approx(1));
  CHECK(p.y == doctest::Approx(0));
  const Polygon sq = {{0, 0}, {4, 0}, {4, 4}, {0, 4}};
  CHECK(distance_to_boundary({1, 2}, sq) == doctest::Approx(1));
  CHECK(segments_intersect({0, 0}, {2, 2}, {0, 2}, {2, 0}));
  CHECK(segments_intersect({0, 0}, {1, 0}, {1, 0}, {2, 1}));
  CHECK_FALSE(segments_intersect({0, 0}, {1, 0}, {0, 1}, {1, 1}));
}

TEST_CASE("simplicity check catches bow ties and degenerate edges") {
  CHECK(is_simple_polygon(Polygon{{0, 0}, {1, 0}, {1, 1}, {0, 1}}));
  CHECK_FALSE(is_simple_polygon(Polygon{{0, 0}, {1, 1}, {1, 0}, {0, 1}}));
  CHECK_FALSE(is_simple_polygon(Polygon{{0, 0}, {1, 0}, {1, 0}, {0, 1}}));
}

TEST_CASE("convex clipping agrees with the grid oracle on random boxes") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    OrientedBox a, b;
    a.pos = {rng.uniform(-50, 50), rng.uniform(-50, 50), 0};
    b.pos = {rng.uniform(-50, 50), rng.uniform(-50, 50), 0};
    a.length = rng.uniform(20, 120);
    a.width = rng.uniform(20, 120);
    b.length = rng.uniform(20, 120);
    b.width = rng.uniform(20, 120);
    a.rotate = rng.uniform(0, 360);
    b.rotate = rng.uniform(0, 360);
    const Quad qa = a.footprint(), qb = b.footprint();
    const double exact = intersection_area_convex(qa, qb);
    const double grid = testing::raster_intersection_area(a, b, 0.25);
    // Boundary cells: perimeter (< 960 cm) times one cell.
    CHECK(std::abs(exact - grid) <= 960 * 0.25 + 1e-9);
    CHECK(exact == doctest::Approx(intersection_area_convex(qb, qa)).epsilon(1e-9));
  }
}

TEST_CASE("clipping a concave subject against a convex window") {
  const Polygon u = {{0, 0}, {3, 0}, {3, 3}, {2, 3}, {2, 1}, {1, 1}, {1, 3}, {0, 3}};
  const Polygon window = {{0, 0}, {3, 0}, {3, 2}, {0, 2}};
  // Inside the window the U covers the bottom strip (3) plus two legs of 1x1.
  CHECK(intersection_area_convex(u, window) == doctest::Approx(5));
}

TEST_CASE("hull drops interior and collinear points") {
  const Polygon h = convex_hull({{0, 0}, {1, 0}, {2, 0}, {2, 2}, {1, 1}, {0, 2}, {1, 2}});
  CHECK(h.size() == 4);
  CHECK(signed_area(h) == doctest::Approx(4));
}

TEST_CASE("minimum-area rectangle of rotated point sets") {
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const double ang = rng.uniform(0, 180), l = rng.uniform(5, 40), w = rng.uniform(5, 40);
    std::vector<Vec2> pts;
    for (int k = 0; k < 200; ++k) {
      pts.push_back(rotate({rng.uniform(-l / 2, l / 2), rng.uniform(-w / 2, w / 2)}, ang));
    }
    for (Vec2 c : {Vec2{-l / 2, -w / 2}, Vec2{l / 2, -w / 2}, Vec2{l / 2, w / 2}, Vec2{-l / 2, w / 2}}) {
      pts.push_back(rotate(c, ang));
    }
    const RotatedRect r = min_area_rect(pts);
    CHECK(r.extent_u * r.extent_v == doctest::Approx(l * w).epsilon(1e-6));
    CHECK(std::abs(cross(r.axis_u, r.axis_v) - 1.0) < 1e-9);
  }
  const RotatedRect axis = min_area_rect(std::vector<Vec2>{{0, 0}, {4, 0}, {4, 2}, {0, 2}});
  CHECK(std::abs(axis.axis_u.y) < 1e-12);
}

TEST_CASE("box footprint is counterclockwise with the front along +v") {
  OrientedBox b;
  b.pos = {10, 20, 0};
  b.length = 4;
  b.width = 2;
  b.rotate = 90;
  const Quad q = b.footprint();
  CHECK(signed_area(q) == doctest::Approx(8));
  // Rotated 90 degrees counterclockwise the length runs along y.
  const Aabb bb = b.bounds();
  CHECK(bb.width() == doctest::Approx(2));
  CHECK(bb.height() == doctest::Approx(4));
}
