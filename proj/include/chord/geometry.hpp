// Copyright 2026 The chord-layout Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

namespace chord {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
  friend Vec2 operator*(double s, Vec2 a) { return {a.x * s, a.y * s}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

constexpr double kPi = 3.14159265358979323846;
inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

/// Counterclockwise rotation by `degrees`.
inline Vec2 rotate(Vec2 p, double degrees) {
  const double r = deg2rad(degrees);
  const double c = std::cos(r), s = std::sin(r);
  return {c * p.x - s * p.y, s * p.x + c * p.y};
}

/// Wraps an angle into [0, 360).
double normalize_degrees(double degrees);

/// Smallest absolute difference between two angles, in [0, 180].
double angle_distance(double a_deg, double b_deg);

using Polygon = std::vector<Vec2>;
using Quad = std::array<Vec2, 4>;

/// Shoelace area; positive for counterclockwise loops (y up).
double signed_area(std::span<const Vec2> poly);
Vec2 centroid(std::span<const Vec2> poly);

/// Even-odd rule. Points exactly on an edge may land on either side.
bool point_in_polygon(Vec2 p, std::span<const Vec2> poly);

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);
/// Closest point to `p` on segment [a, b].
Vec2 project_onto_segment(Vec2 p, Vec2 a, Vec2 b);
double distance_to_boundary(Vec2 p, std::span<const Vec2> poly);

/// Proper or touching intersection test for closed segments.
bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

/// True when no two non-adjacent edges of the closed loop touch and no edge
/// is degenerate.
bool is_simple_polygon(std::span<const Vec2> poly);

/// Clips `subject` (any simple polygon) against a convex `clip` polygon with
/// the Sutherland-Hodgman scheme. Orientation of `clip` may be either way.
Polygon clip_convex(std::span<const Vec2> subject, std::span<const Vec2> clip);

/// Area of subject ∩ convex clip.
double intersection_area_convex(std::span<const Vec2> subject,
                                std::span<const Vec2> clip);

/// Monotone-chain convex hull, counterclockwise, no collinear points.
Polygon convex_hull(std::vector<Vec2> points);

struct RotatedRect {
  Vec2 center;
  Vec2 axis_u;  // unit vector
  Vec2 axis_v;  // axis_u rotated +90 degrees
  double extent_u = 0.0;  // full side length along axis_u
  double extent_v = 0.0;
};

/// Minimum-area enclosing rectangle by rotating calipers over hull edges.
/// Among equal-area candidates the one whose axis is closest to the x axis
/// wins, so axis-aligned inputs give axis-aligned results.
RotatedRect min_area_rect(std::span<const Vec2> points);

struct Aabb {
  double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;

  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
  bool empty() const { return max_x < min_x || max_y < min_y; }
  void expand(Vec2 p);
  void expand(const Aabb& other);
  static Aabb empty_box();
};

}  // namespace chord
