// Copyright 2026 The chord-layout Authors
// SPDX-License-Identifier: Apache-2.0

// Helpers shared by the unit tests and the acceptance runner.

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "chord/geometry.hpp"
#include "chord/perception.hpp"
#include "chord/scene.hpp"

namespace chord::testing {

/// Area of a ∩ b by sampling a grid of `step`-sized cells over the overlap of
/// their bounding boxes. Independent of the clipping code.
inline double raster_intersection_area(const OrientedBox& a, const OrientedBox& b, double step) {
  const Aabb ba = a.bounds(), bb = b.bounds();
  const double x0 = std::max(ba.min_x, bb.min_x), x1 = std::min(ba.max_x, bb.max_x);
  const double y0 = std::max(ba.min_y, bb.min_y), y1 = std::min(ba.max_y, bb.max_y);
  if (x1 <= x0 || y1 <= y0) return 0.0;
  auto inside = [](const OrientedBox& o, double px, double py) {
    const double r = deg2rad(o.rotate);
    const double dx = px - o.pos.x, dy = py - o.pos.y;
    const double u = std::cos(r) * dx + std::sin(r) * dy;
    const double v = -std::sin(r) * dx + std::cos(r) * dy;
    return std::abs(u) <= o.length / 2 && std::abs(v) <= o.width / 2;
  };
  size_t hits = 0;
  const long nx = static_cast<long>(std::ceil((x1 - x0) / step));
  const long ny = static_cast<long>(std::ceil((y1 - y0) / step));
  for (long j = 0; j < ny; ++j) {
    const double py = y0 + (j + 0.5) * step;
    for (long i = 0; i < nx; ++i) {
      const double px = x0 + (i + 0.5) * step;
      if (inside(a, px, py) && inside(b, px, py)) ++hits;
    }
  }
  return static_cast<double>(hits) * step * step;
}

struct MatchStats {
  size_t truth = 0, detected = 0, matched = 0;
  double max_center_px = 0.0;
  double max_dim_px = 0.0;
  size_t orientation_errors = 0;

  double precision() const { return detected ? static_cast<double>(matched) / detected : 1.0; }
  double recall() const { return truth ? static_cast<double>(matched) / truth : 1.0; }
  void add(const MatchStats& o) {
    truth += o.truth;
    detected += o.detected;
    matched += o.matched;
    max_center_px = std::max(max_center_px, o.max_center_px);
    max_dim_px = std::max(max_dim_px, o.max_dim_px);
    orientation_errors += o.orientation_errors;
  }
};

/// Greedy one-to-one matching of detections to ground truth by category and
/// pixel center distance (closest pairs first, within `radius_px`).
inline MatchStats match_detections(const std::vector<OrientedBox>& truth,
                                   const std::vector<Detection>& dets, double scale,
                                   double radius_px = 4.0) {
  MatchStats s;
  s.truth = truth.size();
  s.detected = dets.size();
  struct Pair {
    double d;
    size_t t, k;
  };
  std::vector<Pair> pairs;
  for (size_t t = 0; t < truth.size(); ++t) {
    for (size_t k = 0; k < dets.size(); ++k) {
      if (truth[t].category != dets[k].box.category) continue;
      const double d = norm(truth[t].center() - dets[k].box.center()) * scale;
      if (d <= radius_px) pairs.push_back({d, t, k});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    return a.d < b.d || (a.d == b.d && (a.t < b.t || (a.t == b.t && a.k < b.k)));
  });
  std::vector<char> used_t(truth.size(), 0), used_k(dets.size(), 0);
  for (const Pair& p : pairs) {
    if (used_t[p.t] || used_k[p.k]) continue;
    used_t[p.t] = used_k[p.k] = 1;
    ++s.matched;
    const OrientedBox& g = truth[p.t];
    const OrientedBox& d = dets[p.k].box;
    s.max_center_px = std::max(s.max_center_px, p.d);
    s.max_dim_px = std::max({s.max_dim_px, std::abs(g.length - d.length) * scale,
                             std::abs(g.width - d.width) * scale});
    if (angle_distance(g.rotate, d.rotate) > 1e-6) ++s.orientation_errors;
  }
  return s;
}

}  // namespace chord::testing
