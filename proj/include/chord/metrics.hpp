// Copyright 2026 The chord-layout Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "chord/scene.hpp"

namespace chord {

/// Pairs whose footprints share less than this many cm^2 do not count as
/// intersecting (shared edges are not collisions).
constexpr double kAreaEpsilon = 1.0;

/// Area of the intersection of two footprints (convex clipping). Symmetric.
double footprint_intersection_area(const OrientedBox& a, const OrientedBox& b);
double footprint_iou(const OrientedBox& a, const OrientedBox& b);

/// Fraction of unordered pairs with intersection area > eps. 0 for n < 2.
double scene_por(std::span<const OrientedBox> objects, double eps_area = kAreaEpsilon);
/// Mean IoU over all unordered pairs. 0 for n < 2.
double scene_piou(std::span<const OrientedBox> objects);

struct SceneMetrics {
  double por = 0.0;
  double piou = 0.0;
  /// Mean IoU over intersecting pairs only (0 when none intersect).
  double piou_intersecting = 0.0;
  size_t object_count = 0;
  size_t pair_count = 0;
  size_t intersecting_pairs = 0;
  size_t room_count = 0;  // inner rooms; the house outline is excluded
  size_t empty_room_count = 0;
};

SceneMetrics object_metrics(std::span<const OrientedBox> objects, double eps_area = kAreaEpsilon);
SceneMetrics scene_metrics(const Scene& scene, double eps_area = kAreaEpsilon);

struct CorpusMetrics {
  size_t scene_count = 0;
  double mean_por = 0.0;
  double mean_piou = 0.0;
  double mean_piou_intersecting = 0.0;
  size_t room_count = 0;
  size_t empty_room_count = 0;
  double empty_room_rate = 0.0;
  std::map<std::string, size_t> category_occurrence;
  std::map<size_t, size_t> rooms_per_house;
  std::vector<SceneMetrics> per_scene;

  std::string to_json() const;
  /// Aligned two-column text report.
  std::string to_table() const;
  std::string category_csv() const;
  std::string rooms_per_house_csv() const;
};

/// Arithmetic mean of per-scene values. Throws kArgument for an empty corpus.
CorpusMetrics corpus_metrics(std::span<const Scene> scenes, double eps_area = kAreaEpsilon);
CorpusMetrics corpus_metrics(std::span<const SceneMetrics> per_scene);

struct RankSumResult {
  double u = 0.0;          // Mann-Whitney U of the first sample
  double z = 0.0;          // normal approximation, tie-corrected
  double p_greater = 1.0;  // one-sided p for "first sample tends larger"
};

/// Wilcoxon rank-sum / Mann-Whitney test with the large-sample normal
/// approximation.
RankSumResult rank_sum_test(std::span<const double> first, std::span<const double> second);

}  // namespace chord
