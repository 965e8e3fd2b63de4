// Copyright 2026 The chord-layout Authors
// SPDX-License-Identifier: Apache-2.0

#include "chord/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include "json.hpp"
#include <numeric>
#include <sstream>

#include "chord/error.hpp"

namespace chord {

double footprint_intersection_area(const OrientedBox& a, const OrientedBox& b) {
  const Quad qa = a.footprint(), qb = b.footprint();
  // Cheap reject on the bounding circles.
  const double ra = 0.5 * std::hypot(a.length, a.width);
  const double rb = 0.5 * std::hypot(b.length, b.width);
  if (norm(a.center() - b.center()) > ra + rb) return 0.0;
  // Clip in a frame centered on `a` to keep cancellation error small.
  const Vec2 origin = a.center();
  Quad la, lb;
  for (int i = 0; i < 4; ++i) {
    la[i] = qa[i] - origin;
    lb[i] = qb[i] - origin;
  }
  const double area = intersection_area_convex(la, lb);
  return std::min(area, std::min(a.footprint_area(), b.footprint_area()));
}

double footprint_iou(const OrientedBox& a, const OrientedBox& b) {
  const double inter = footprint_intersection_area(a, b);
  const double uni = a.footprint_area() + b.footprint_area() - inter;
  if (!(uni > 0)) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

SceneMetrics object_metrics(std::span<const OrientedBox> objects, double eps_area) {
  SceneMetrics m;
  const size_t n = objects.size();
  m.object_count = n;
  if (n < 2) return m;
  double iou_sum = 0.0, iou_hit_sum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      ++m.pair_count;
      const double inter = footprint_intersection_area(objects[i], objects[j]);
      const double uni = objects[i].footprint_area() + objects[j].footprint_area() - inter;
      const double iou = uni > 0 ? std::clamp(inter / uni, 0.0, 1.0) : 0.0;
      iou_sum += iou;
      if (inter > eps_area) {
        ++m.intersecting_pairs;
        iou_hit_sum += iou;
      }
    }
  }
  m.por = static_cast<double>(m.intersecting_pairs) / static_cast<double>(m.pair_count);
  m.piou = iou_sum / static_cast<double>(m.pair_count);
  m.piou_intersecting =
      m.intersecting_pairs ? iou_hit_sum / static_cast<double>(m.intersecting_pairs) : 0.0;
  return m;
}

double scene_por(std::span<const OrientedBox> objects, double eps_area) {
  return object_metrics(objects, eps_area).por;
}

double scene_piou(std::span<const OrientedBox> objects) { return object_metrics(objects).piou; }

SceneMetrics scene_metrics(const Scene& scene, double eps_area) {
  SceneMetrics m = object_metrics(scene.furniture, eps_area);
  for (const Room& r : scene.rooms) {
    if (r.is_outline() || r.wall_points.size() < 3) continue;
    ++m.room_count;
    const bool occupied = std::any_of(scene.furniture.begin(), scene.furniture.end(),
                                      [&](const OrientedBox& f) {
                                        return point_in_polygon(f.center(), r.wall_points);
                                      });
    if (!occupied) ++m.empty_room_count;
  }
  return m;
}

CorpusMetrics corpus_metrics(std::span<const SceneMetrics> per_scene) {
  if (per_scene.empty()) fail(ErrorKind::kArgument, "corpus is empty");
  CorpusMetrics c;
  c.scene_count = per_scene.size();
  c.per_scene.assign(per_scene.begin(), per_scene.end());
  for (const SceneMetrics& m : per_scene) {
    c.mean_por += m.por;
    c.mean_piou += m.piou;
    c.mean_piou_intersecting += m.piou_intersecting;
    c.room_count += m.room_count;
    c.empty_room_count += m.empty_room_count;
  }
  const double n = static_cast<double>(c.scene_count);
  c.mean_por /= n;
  c.mean_piou /= n;
  c.mean_piou_intersecting /= n;
  c.empty_room_rate =
      c.room_count ? static_cast<double>(c.empty_room_count) / static_cast<double>(c.room_count) : 0.0;
  return c;
}

CorpusMetrics corpus_metrics(std::span<const Scene> scenes, double eps_area) {
  if (scenes.empty()) fail(ErrorKind::kArgument, "corpus is empty");
  std::vector<SceneMetrics> per;
  per.reserve(scenes.size());
  for (const Scene& s : scenes) per.push_back(scene_metrics(s, eps_area));
  CorpusMetrics c = corpus_metrics(per);
  for (const Scene& s : scenes) {
    for (const OrientedBox& f : s.furniture) ++c.category_occurrence[f.category];
    const size_t rooms = static_cast<size_t>(std::count_if(
        s.rooms.begin(), s.rooms.end(), [](const Room& r) { return !r.is_outline(); }));
    ++c.rooms_per_house[rooms];
  }
  return c;
}

std::string CorpusMetrics::to_json() const {
  nlohmann::json j;
  j["scene_count"] = scene_count;
  j["mean_por"] = mean_por;
  j["mean_piou"] = mean_piou;
  j["mean_piou_intersecting"] = mean_piou_intersecting;
  j["room_count"] = room_count;
  j["empty_room_count"] = empty_room_count;
  j["empty_room_rate"] = empty_room_rate;
  j["fid"] = "n/a";
  j["kid"] = "n/a";
  j["category_occurrence"] = nlohmann::json::object();
  for (const auto& [k, v] : category_occurrence) j["category_occurrence"][k] = v;
  j["rooms_per_house"] = nlohmann::json::object();
  for (const auto& [k, v] : rooms_per_house) j["rooms_per_house"][std::to_string(k)] = v;
  j["per_scene"] = nlohmann::json::array();
  for (const SceneMetrics& m : per_scene) {
    j["per_scene"].push_back({{"por", m.por},
                              {"piou", m.piou},
                              {"piou_intersecting", m.piou_intersecting},
                              {"objects", m.object_count},
                              {"pairs", m.pair_count},
                              {"intersecting_pairs", m.intersecting_pairs},
                              {"rooms", m.room_count},
                              {"empty_rooms", m.empty_room_count}});
  }
  return j.dump(2);
}

std::string CorpusMetrics::to_table() const {
  std::ostringstream o;
  auto row = [&](const std::string& k, const std::string& v) {
    o << std::left << std::setw(26) << k << std::right << std::setw(14) << v << "\n";
  };
  auto num = [](double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(6) << v;
    return s.str();
  };
  row("scenes", std::to_string(scene_count));
  row("POR (mean)", num(mean_por));
  row("PIoU (mean, all pairs)", num(mean_piou));
  row("PIoU (intersecting)", num(mean_piou_intersecting));
  row("rooms", std::to_string(room_count));
  row("empty rooms", std::to_string(empty_room_count));
  row("empty room rate", num(empty_room_rate));
  row("FID", "n/a");
  row("KID", "n/a");
  return o.str();
}

std::string CorpusMetrics::category_csv() const {
  std::ostringstream o;
  o << "category,occurrence\n";
  for (const auto& [k, v] : category_occurrence) o << k << "," << v << "\n";
  return o.str();
}

std::string CorpusMetrics::rooms_per_house_csv() const {
  std::ostringstream o;
  o << "rooms_per_house,occurrence\n";
  for (const auto& [k, v] : rooms_per_house) o << k << "," << v << "\n";
  return o.str();
}

RankSumResult rank_sum_test(std::span<const double> first, std::span<const double> second) {
  const size_t n1 = first.size(), n2 = second.size();
  if (n1 == 0 || n2 == 0) fail(ErrorKind::kArgument, "rank-sum test needs two nonempty samples");
  struct Item {
    double v;
    int group;
  };
  std::vector<Item> all;
  all.reserve(n1 + n2);
  for (double v : first) all.push_back({v, 0});
  for (double v : second) all.push_back({v, 1});
  std::sort(all.begin(), all.end(), [](const Item& a, const Item& b) { return a.v < b.v; });

  double rank_sum = 0.0, tie_term = 0.0;
  for (size_t i = 0; i < all.size();) {
    size_t j = i;
    while (j < all.size() && all[j].v == all[i].v) ++j;
    const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    for (size_t k = i; k < j; ++k) {
      if (all[k].group == 0) rank_sum += avg_rank;
    }
    i = j;
  }
  const double dn1 = static_cast<double>(n1), dn2 = static_cast<double>(n2), n = dn1 + dn2;
  RankSumResult r;
  r.u = rank_sum - dn1 * (dn1 + 1) / 2;
  const double mean = dn1 * dn2 / 2;
  const double var = dn1 * dn2 / 12 * ((n + 1) - tie_term / (n * (n - 1)));
  if (var <= 0) {
    r.z = 0;
    r.p_greater = 0.5;
    return r;
  }
  r.z = (r.u - mean) / std::sqrt(var);
  r.p_greater = 0.5 * std::erfc(r.z / std::sqrt(2.0));
  return r;
}

}  // namespace chord
