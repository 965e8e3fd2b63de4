// Copyright 2026 The chord-layout Authors
// SPDX-License-Identifier: Apache-2.0

#include "chord/geometry.hpp"

#include <algorithm>
#include <limits>

namespace chord {

double normalize_degrees(double degrees) {
  double r = std::fmod(degrees, 360.0);
  if (r < 0.0) r += 360.0;
  if (r >= 360.0) r -= 360.0;  // fmod(-1e-18, 360) + 360 rounds to 360
  return r;
}

double angle_distance(double a_deg, double b_deg) {
  const double d = normalize_degrees(a_deg - b_deg);
  return std::min(d, 360.0 - d);
}

double signed_area(std::span<const Vec2> poly) {
  const size_t n = poly.size();
  if (n < 3) return 0.0;
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    acc += cross(poly[i], poly[(i + 1) % n]);
  }
  return 0.5 * acc;
}

Vec2 centroid(std::span<const Vec2> poly) {
  const double a = signed_area(poly);
  const size_t n = poly.size();
  if (n == 0) return {};
  if (std::abs(a) < 1e-12) {
    Vec2 s;
    for (const Vec2& p : poly) s = s + p;
    return s * (1.0 / static_cast<double>(n));
  }
  double cx = 0.0, cy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const Vec2 p = poly[i], q = poly[(i + 1) % n];
    const double c = cross(p, q);
    cx += (p.x + q.x) * c;
    cy += (p.y + q.y) * c;
  }
  return {cx / (6.0 * a), cy / (6.0 * a)};
}

bool point_in_polygon(Vec2 p, std::span<const Vec2> poly) {
  bool inside = false;
  const size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = poly[i], b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

Vec2 project_onto_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 <= 0.0) return a;
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return a + ab * t;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  return norm(p - project_onto_segment(p, a, b));
}

double distance_to_boundary(Vec2 p, std::span<const Vec2> poly) {
  double best = std::numeric_limits<double>::infinity();
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    best = std::min(best, point_segment_distance(p, poly[i], poly[(i + 1) % n]));
  }
  return best;
}

namespace {

int orientation(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  const double scale =
      std::max({std::abs(b.x - a.x), std::abs(b.y - a.y), std::abs(c.x - a.x),
                std::abs(c.y - a.y), 1.0});
  if (std::abs(v) <= 1e-12 * scale * scale) return 0;
  return v > 0 ? 1 : -1;
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) - 1e-12 <= p.x && p.x <= std::max(a.x, b.x) + 1e-12 &&
         std::min(a.y, b.y) - 1e-12 <= p.y && p.y <= std::max(a.y, b.y) + 1e-12;
}

}  // namespace

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const int o1 = orientation(a, b, c), o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a), o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

bool is_simple_polygon(std::span<const Vec2> poly) {
  const size_t n = poly.size();
  if (n < 3) return false;
  for (size_t i = 0; i < n; ++i) {
    if (poly[i] == poly[(i + 1) % n]) return false;
  }
  for (size_t i = 0; i < n; ++i) {
    const Vec2 a = poly[i], b = poly[(i + 1) % n];
    for (size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      const Vec2 c = poly[j], d = poly[(j + 1) % n];
      if (adjacent) {
        // Adjacent edges share one vertex; they must not fold back onto
        // each other.
        const Vec2 shared = (j == i + 1) ? b : a;
        const Vec2 p = (j == i + 1) ? a : b;
        const Vec2 q = (j == i + 1) ? d : c;
        if (orientation(p, shared, q) == 0 && dot(p - shared, q - shared) > 0) {
          return false;
        }
        continue;
      }
      if (segments_intersect(a, b, c, d)) return false;
    }
  }
  return true;
}

Polygon clip_convex(std::span<const Vec2> subject, std::span<const Vec2> clip) {
  Polygon output(subject.begin(), subject.end());
  const size_t m = clip.size();
  if (m < 3 || output.empty()) return {};
  const double orient = signed_area(clip) >= 0.0 ? 1.0 : -1.0;

  Polygon input;
  for (size_t i = 0; i < m && !output.empty(); ++i) {
    const Vec2 a = clip[i], b = clip[(i + 1) % m];
    input.swap(output);
    output.clear();
    auto side = [&](Vec2 p) { return orient * cross(b - a, p - a); };
    const size_t k = input.size();
    for (size_t j = 0; j < k; ++j) {
      const Vec2 cur = input[j], prev = input[(j + k - 1) % k];
      const double sc = side(cur), sp = side(prev);
      if (sc >= 0.0) {
        if (sp < 0.0) {
          const double t = sp / (sp - sc);
          output.push_back(prev + (cur - prev) * t);
        }
        output.push_back(cur);
      } else if (sp >= 0.0) {
        const double t = sp / (sp - sc);
        output.push_back(prev + (cur - prev) * t);
      }
    }
  }
  return output;
}

double intersection_area_convex(std::span<const Vec2> subject,
                                std::span<const Vec2> clip) {
  const Polygon p = clip_convex(subject, clip);
  return std::abs(signed_area(p));
}

Polygon convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  Polygon hull(2 * pts.size());
  size_t k = 0;
  for (size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(hull[k - 1] - hull[k - 2], pts[i - 1] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i - 1];
  }
  hull.resize(k - 1);
  return hull;
}

RotatedRect min_area_rect(std::span<const Vec2> points) {
  RotatedRect best;
  if (points.empty()) return best;
  const Polygon hull = convex_hull({points.begin(), points.end()});
  if (hull.size() < 3) {
    Aabb box = Aabb::empty_box();
    for (const Vec2& p : hull) box.expand(p);
    best.center = {(box.min_x + box.max_x) / 2, (box.min_y + box.max_y) / 2};
    best.axis_u = {1, 0};
    best.axis_v = {0, 1};
    best.extent_u = box.width();
    best.extent_v = box.height();
    return best;
  }

  double best_area = std::numeric_limits<double>::infinity();
  double best_tilt = std::numeric_limits<double>::infinity();
  const size_t n = hull.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2 e = hull[(i + 1) % n] - hull[i];
    const double len = norm(e);
    if (len <= 0.0) continue;
    // Canonical angle in [0, 90): the rectangle is the same for u and u+90.
    double ang = std::fmod(rad2deg(std::atan2(e.y, e.x)), 90.0);
    if (ang < 0) ang += 90.0;
    if (ang > 90.0 - 1e-9) ang = 0.0;
    const double r = deg2rad(ang);
    const Vec2 u{std::cos(r), std::sin(r)};
    const Vec2 v{-u.y, u.x};
    double min_u = std::numeric_limits<double>::infinity(), max_u = -min_u;
    double min_v = min_u, max_v = -min_u;
    for (const Vec2& p : hull) {
      const double pu = dot(p, u), pv = dot(p, v);
      min_u = std::min(min_u, pu);
      max_u = std::max(max_u, pu);
      min_v = std::min(min_v, pv);
      max_v = std::max(max_v, pv);
    }
    const double area = (max_u - min_u) * (max_v - min_v);
    const double tilt = std::min(ang, 90.0 - ang);
    const bool better = area < best_area * (1 - 1e-9) ||
                        (area <= best_area * (1 + 1e-9) && tilt < best_tilt);
    if (better) {
      best_area = area;
      best_tilt = tilt;
      const double cu = (min_u + max_u) / 2, cv = (min_v + max_v) / 2;
      best.center = u * cu + v * cv;
      best.axis_u = u;
      best.axis_v = v;
      best.extent_u = max_u - min_u;
      best.extent_v = max_v - min_v;
    }
  }
  return best;
}

void Aabb::expand(Vec2 p) {
  min_x = std::min(min_x, p.x);
  min_y = std::min(min_y, p.y);
  max_x = std::max(max_x, p.x);
  max_y = std::max(max_y, p.y);
}

void Aabb::expand(const Aabb& o) {
  if (o.empty()) return;
  expand(Vec2{o.min_x, o.min_y});
  expand(Vec2{o.max_x, o.max_y});
}

Aabb Aabb::empty_box() {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return {inf, inf, -inf, -inf};
}

}  // namespace chord
