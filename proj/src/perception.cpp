// Copyright 2026 The chord-layout Authors
// SPDX-License-Identifier: Apache-2.0

#include "chord/perception.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include "json.hpp"
#include <queue>

#include "chord/error.hpp"

namespace chord {

namespace {

double color_distance(const Color& a, const Color& b) {
  const double dr = a[0] - b[0], dg = a[1] - b[1], db = a[2] - b[2];
  return std::sqrt(dr * dr + dg * dg + db * db);
}

}  // namespace

PixelClassifier::PixelClassifier(const Palette& palette, double tau, double min_separation)
    : palette_(palette), tau_(tau) {
  refs_.push_back({to_color(palette.background()), LabelMap::kBackground});
  const auto& entries = palette.entries();
  for (size_t i = 0; i < entries.size(); ++i) {
    const PaletteEntry& e = entries[i];
    refs_.push_back({palette.body_color(e), LabelMap::encode(static_cast<int>(i), false)});
    if (e.role == Role::kObject) {
      refs_.push_back({palette.marker_color(e), LabelMap::encode(static_cast<int>(i), true)});
    }
  }
  auto describe = [&](int32_t label) -> std::string {
    if (label == LabelMap::kBackground) return "background";
    const std::string& n = entries[LabelMap::entry_of(label)].name;
    return LabelMap::is_marker(label) ? n + " (marker)" : n;
  };
  for (size_t a = 0; a < refs_.size(); ++a) {
    for (size_t b = a + 1; b < refs_.size(); ++b) {
      const double d = color_distance(refs_[a].color, refs_[b].color);
      if (d < min_separation) {
        fail(ErrorKind::kPalette, "composited colors of " + describe(refs_[a].label) + " and " +
                                      describe(refs_[b].label) + " are " + std::to_string(d) +
                                      " apart; cannot be told apart");
      }
    }
  }
}

int32_t PixelClassifier::classify(const Color& c) const {
  double best = std::numeric_limits<double>::infinity();
  int32_t label = LabelMap::kUnknown;
  for (const Ref& r : refs_) {
    const double d = color_distance(c, r.color);
    if (d < best) {
      best = d;
      label = r.label;
    }
  }
  return best <= tau_ ? label : LabelMap::kUnknown;
}

double PixelClassifier::distance(const Color& c, int32_t label) const {
  for (const Ref& r : refs_) {
    if (r.label == label) return color_distance(c, r.color);
  }
  return std::numeric_limits<double>::infinity();
}

LabelMap classify_pixels(const LayoutImage& image, const Palette& palette, double tau) {
  const PixelClassifier cls(palette, tau);
  LabelMap m;
  m.width = image.width;
  m.height = image.height;
  m.labels.resize(static_cast<size_t>(image.width) * image.height);
  // Decoded images hold few distinct colors; memoize on the 8-bit value.
  std::map<uint32_t, int32_t> cache;
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const Color c = image.get(x, y);
      int32_t label;
      const auto q = [](double v) { return static_cast<uint32_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255)); };
      const uint32_t key = (q(c[0]) << 16) | (q(c[1]) << 8) | q(c[2]);
      const bool exact8 = std::abs(c[0] * 255 - std::round(c[0] * 255)) < 1e-4 &&
                          std::abs(c[1] * 255 - std::round(c[1] * 255)) < 1e-4 &&
                          std::abs(c[2] * 255 - std::round(c[2] * 255)) < 1e-4;
      if (exact8) {
        auto it = cache.find(key);
        if (it == cache.end()) it = cache.emplace(key, cls.classify(c)).first;
        label = it->second;
      } else {
        label = cls.classify(c);
      }
      m.labels[static_cast<size_t>(y) * image.width + x] = label;
    }
  }
  return m;
}

namespace {

constexpr int kDx8[] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int kDy8[] = {0, 1, 1, 1, 0, -1, -1, -1};

Vec2 pixel_center(int32_t idx, int width) {
  return {idx % width + 0.5, idx / width + 0.5};
}

// Pixel centers hull, widened by one pixel so that an n-pixel run measures n.
RotatedRect fit_pixels(const std::vector<int32_t>& pixels, int width) {
  std::vector<Vec2> pts;
  pts.reserve(pixels.size());
  for (int32_t p : pixels) pts.push_back(pixel_center(p, width));
  RotatedRect r = min_area_rect(pts);
  r.extent_u += 1.0;
  r.extent_v += 1.0;
  return r;
}

/// Distance-transform watershed. Returns one pixel list per basin, or an
/// empty vector when the component has a single basin.
std::vector<std::vector<int32_t>> watershed_split(const std::vector<int32_t>& pixels, int width) {
  int x0 = std::numeric_limits<int>::max(), y0 = x0, x1 = -1, y1 = -1;
  for (int32_t p : pixels) {
    x0 = std::min(x0, p % width);
    x1 = std::max(x1, p % width);
    y0 = std::min(y0, p / width);
    y1 = std::max(y1, p / width);
  }
  // Local grid with a one-pixel empty border.
  const int w = x1 - x0 + 3, h = y1 - y0 + 3;
  auto local = [&](int32_t p) { return (p / width - y0 + 1) * w + (p % width - x0 + 1); };
  std::vector<char> mask(static_cast<size_t>(w) * h, 0);
  for (int32_t p : pixels) mask[local(p)] = 1;

  // Two-pass chamfer distance (1, sqrt 2) to the nearest empty pixel.
  constexpr double kInf = 1e18;
  const double diag = std::sqrt(2.0);
  std::vector<double> d(mask.size());
  for (size_t i = 0; i < mask.size(); ++i) d[i] = mask[i] ? kInf : 0.0;
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      double& v = d[y * w + x];
      if (v == 0.0) continue;
      v = std::min({v, d[y * w + x - 1] + 1, d[(y - 1) * w + x] + 1,
                    d[(y - 1) * w + x - 1] + diag, d[(y - 1) * w + x + 1] + diag});
    }
  }
  for (int y = h - 2; y >= 1; --y) {
    for (int x = w - 2; x >= 1; --x) {
      double& v = d[y * w + x];
      if (v == 0.0) continue;
      v = std::min({v, d[y * w + x + 1] + 1, d[(y + 1) * w + x] + 1,
                    d[(y + 1) * w + x + 1] + diag, d[(y + 1) * w + x - 1] + diag});
    }
  }
  double max_d = 0;
  for (double v : d) max_d = std::max(max_d, v);
  const double thr = std::max(2.0, 0.6 * max_d);

  std::vector<int> basin(mask.size(), -1);
  int seeds = 0;
  for (int i = 0; i < w * h; ++i) {
    if (!mask[i] || d[i] < thr || basin[i] >= 0) continue;
    std::vector<int> stack{i};
    basin[i] = seeds;
    while (!stack.empty()) {
      const int c = stack.back();
      stack.pop_back();
      for (int k = 0; k < 8; ++k) {
        const int n = c + kDy8[k] * w + kDx8[k];
        if (mask[n] && d[n] >= thr && basin[n] < 0) {
          basin[n] = seeds;
          stack.push_back(n);
        }
      }
    }
    ++seeds;
  }
  if (seeds < 2) return {};

  // Priority flood from the seeds, deepest pixels first; ties by index.
  using Item = std::pair<double, int>;
  auto cmp = [](const Item& a, const Item& b) {
    return a.first < b.first || (a.first == b.first && a.second > b.second);
  };
  std::priority_queue<Item, std::vector<Item>, decltype(cmp)> pq(cmp);
  for (int i = 0; i < w * h; ++i) {
    if (basin[i] >= 0) pq.push({d[i], i});
  }
  while (!pq.empty()) {
    const int c = pq.top().second;
    pq.pop();
    for (int k = 0; k < 8; ++k) {
      const int n = c + kDy8[k] * w + kDx8[k];
      if (mask[n] && basin[n] < 0) {
        basin[n] = basin[c];
        pq.push({d[n], n});
      }
    }
  }
  std::vector<std::vector<int32_t>> out(seeds);
  for (int32_t p : pixels) out[basin[local(p)]].push_back(p);
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

double snap_angle(double deg, double window) {
  const double nearest = std::round(deg / 90.0) * 90.0;
  if (std::abs(deg - nearest) <= window) return normalize_degrees(nearest);
  return normalize_degrees(deg);
}

Detection make_detection(std::vector<int32_t> pixels, int entry, const LabelMap& labels,
                         const LayoutImage& image, const PixelClassifier& cls,
                         const WorldTransform& t, const DetectOptions& opt) {
  const int width = labels.width;
  const RotatedRect r = fit_pixels(pixels, width);

  Vec2 msum{0, 0};
  size_t mcount = 0, exact = 0;
  for (int32_t p : pixels) {
    const int32_t label = labels.labels[p];
    if (LabelMap::is_marker(label)) {
      msum = msum + pixel_center(p, width);
      ++mcount;
    }
    if (cls.distance(image.get(p % width, p / width), label) <= opt.confidence_tol) ++exact;
  }

  Detection det;
  det.confidence = static_cast<double>(exact) / static_cast<double>(pixels.size());
  det.center_px = r.center;

  Vec2 front = r.axis_v;
  det.length_px = r.extent_u;
  det.width_px = r.extent_v;
  if (mcount > 0) {
    const Vec2 off = msum * (1.0 / static_cast<double>(mcount)) - r.center;
    const double pu = dot(off, r.axis_u), pv = dot(off, r.axis_v);
    const double major = std::max(std::abs(pu), std::abs(pv));
    const double minor = std::min(std::abs(pu), std::abs(pv));
    if (major >= 0.25) {
      if (std::abs(pv) >= std::abs(pu)) {
        front = pv > 0 ? r.axis_v : r.axis_v * -1.0;
      } else {
        front = pu > 0 ? r.axis_u : r.axis_u * -1.0;
        det.length_px = r.extent_v;
        det.width_px = r.extent_u;
      }
      const double expected = det.width_px / 2 - marker_depth_px(det.width_px) / 2;
      det.orientation_confidence =
          expected > 0 ? std::clamp((major - minor) / expected, 0.0, 1.0) : 0.0;
    } else {
      det.flags.push_back("marker_at_center");
    }
  } else {
    det.flags.push_back("no_marker");
  }
  const double theta = rad2deg(std::atan2(-front.x, front.y));

  const std::string& name = cls.palette().entries()[entry].name;
  OrientedBox& b = det.box;
  b.category = name;
  const Vec2 c = t.to_world(r.center);
  b.pos = {c.x, c.y, 0.0};
  b.length = det.length_px / t.scale;
  b.width = det.width_px / t.scale;
  b.height = nominal_size(name).z;
  b.rotate = snap_angle(theta, opt.snap_window_deg);
  det.pixels = std::move(pixels);
  return det;
}

}  // namespace

std::vector<Detection> detect_objects(const LayoutImage& image, const Palette& palette,
                                      const WorldTransform& transform,
                                      const DetectOptions& options) {
  if (!(transform.scale > 0)) fail(ErrorKind::kTransform, "transform scale must be positive");
  const PixelClassifier cls(palette, options.tau);
  const LabelMap labels = classify_pixels(image, palette, options.tau);
  const auto& entries = palette.entries();
  auto detectable = [&](int32_t label) {
    if (label < 0) return false;
    const PaletteEntry& e = entries[LabelMap::entry_of(label)];
    if (e.role != Role::kObject) return false;
    // At the fine level the parent is only drawn as an outline.
    return !(palette.level() == Level::kFine && is_fine_parent(e.name));
  };

  const int w = labels.width, h = labels.height;
  std::vector<char> seen(labels.labels.size(), 0);
  std::vector<Detection> out;
  for (int32_t start = 0; start < w * h; ++start) {
    if (seen[start] || !detectable(labels.labels[start])) continue;
    const int entry = LabelMap::entry_of(labels.labels[start]);
    std::vector<int32_t> comp{start};
    seen[start] = 1;
    for (size_t head = 0; head < comp.size(); ++head) {
      const int x = comp[head] % w, y = comp[head] / w;
      for (int k = 0; k < 8; ++k) {
        const int nx = x + kDx8[k], ny = y + kDy8[k];
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const int32_t n = ny * w + nx;
        if (seen[n] || labels.labels[n] < 0 || LabelMap::entry_of(labels.labels[n]) != entry) {
          continue;
        }
        seen[n] = 1;
        comp.push_back(n);
      }
    }
    if (static_cast<int>(comp.size()) < options.min_area_px) continue;
    std::sort(comp.begin(), comp.end());

    std::vector<std::vector<int32_t>> parts;
    if (options.split_overlaps) {
      const RotatedRect r = fit_pixels(comp, w);
      const double fill = static_cast<double>(comp.size()) / (r.extent_u * r.extent_v);
      if (fill < options.split_fill_ratio) parts = watershed_split(comp, w);
    }
    if (parts.empty()) {
      out.push_back(make_detection(std::move(comp), entry, labels, image, cls, transform, options));
      continue;
    }
    for (auto& part : parts) {
      if (static_cast<int>(part.size()) < options.min_area_px) continue;
      Detection d = make_detection(std::move(part), entry, labels, image, cls, transform, options);
      d.flags.push_back("split");
      out.push_back(std::move(d));
    }
  }
  return out;
}

std::string detections_to_json(const std::vector<Detection>& detections) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Detection& d : detections) {
    const OrientedBox& b = d.box;
    nlohmann::json j;
    j["type"] = b.category;
    j["pos"] = {b.pos.x, b.pos.y, b.pos.z};
    j["length"] = b.length;
    j["width"] = b.width;
    j["height"] = b.height;
    j["rotate"] = b.rotate;
    j["confidence"] = d.confidence;
    j["orientation_confidence"] = d.orientation_confidence;
    if (!d.flags.empty()) j["flags"] = d.flags;
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

std::vector<Detection> detections_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::kParse, "malformed JSON at byte " + std::to_string(e.byte));
  }
  if (doc.is_object() && doc.contains("furniture")) doc = doc["furniture"];
  if (!doc.is_array()) fail(ErrorKind::kSchema, "detections must be a JSON array");
  std::vector<Detection> out;
  for (size_t i = 0; i < doc.size(); ++i) {
    const auto& j = doc[i];
    const std::string path = "/" + std::to_string(i);
    try {
      Detection d;
      OrientedBox& b = d.box;
      b.category = j.at("type").get<std::string>();
      const auto& pos = j.at("pos");
      if (!pos.is_array() || pos.size() < 2 || pos.size() > 3) {
        fail(ErrorKind::kType, "expected [x, y] or [x, y, z] at " + path + "/pos");
      }
      b.pos = {pos[0].get<double>(), pos[1].get<double>(), pos.size() == 3 ? pos[2].get<double>() : 0.0};
      b.length = j.at("length").get<double>();
      b.width = j.at("width").get<double>();
      b.height = j.value("height", nominal_size(b.category).z);
      b.rotate = normalize_degrees(j.value("rotate", 0.0));
      d.confidence = j.value("confidence", 1.0);
      d.orientation_confidence = j.value("orientation_confidence", 1.0);
      if (j.contains("flags")) d.flags = j["flags"].get<std::vector<std::string>>();
      out.push_back(std::move(d));
    } catch (const nlohmann::json::out_of_range& e) {
      fail(ErrorKind::kSchema, "missing required key at " + path + ": " + e.what());
    } catch (const nlohmann::json::type_error& e) {
      fail(ErrorKind::kType, "wrong value type at " + path + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Room segmentation
// ---------------------------------------------------------------------------

namespace {

/// Boundary of a pixel region as loops of pixel-corner coordinates. Each
/// boundary edge is directed with the region on its left (y down, so loops
/// come out clockwise on screen and counterclockwise in y-up terms).
Polygon trace_boundary(const std::vector<int>& region_of, int region, int w, int h) {
  auto inside = [&](int x, int y) {
    return x >= 0 && y >= 0 && x < w && y < h && region_of[y * w + x] == region;
  };
  // Directed edges keyed by their start corner.
  std::multimap<std::pair<int, int>, std::pair<int, int>> edges;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!inside(x, y)) continue;
      if (!inside(x, y - 1)) edges.insert({{x + 1, y}, {x, y}});
      if (!inside(x, y + 1)) edges.insert({{x, y + 1}, {x + 1, y + 1}});
      if (!inside(x - 1, y)) edges.insert({{x, y}, {x, y + 1}});
      if (!inside(x + 1, y)) edges.insert({{x + 1, y + 1}, {x + 1, y}});
    }
  }
  Polygon best;
  double best_area = 0;
  while (!edges.empty()) {
    auto it = edges.begin();
    const std::pair<int, int> first = it->first;
    std::pair<int, int> cur = it->second;
    std::pair<int, int> prev_dir{cur.first - first.first, cur.second - first.second};
    edges.erase(it);
    Polygon loop{{static_cast<double>(first.first), static_cast<double>(first.second)}};
    while (cur != first) {
      loop.push_back({static_cast<double>(cur.first), static_cast<double>(cur.second)});
      auto range = edges.equal_range(cur);
      if (range.first == range.second) break;
      // At pinch corners prefer the sharpest turn that keeps the region on
      // the left, so touching loops are separated.
      auto pick = range.first;
      int best_rank = 9;
      for (auto e = range.first; e != range.second; ++e) {
        const std::pair<int, int> dir{e->second.first - cur.first, e->second.second - cur.second};
        const int c = prev_dir.first * dir.second - prev_dir.second * dir.first;
        const int rank = c < 0 ? 0 : (c == 0 ? 1 : 2);
        if (rank < best_rank) {
          best_rank = rank;
          pick = e;
        }
      }
      const std::pair<int, int> next = pick->second;
      prev_dir = {next.first - cur.first, next.second - cur.second};
      edges.erase(pick);
      cur = next;
    }
    const double a = std::abs(signed_area(loop));
    if (a > best_area) {
      best_area = a;
      best = std::move(loop);
    }
  }
  // Drop collinear corners.
  Polygon simple;
  const size_t n = best.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2 a = best[(i + n - 1) % n], b = best[i], c = best[(i + 1) % n];
    if (std::abs(cross(b - a, c - b)) > 1e-12) simple.push_back(b);
  }
  if (signed_area(simple) < 0) std::reverse(simple.begin(), simple.end());
  return simple;
}

}  // namespace

std::vector<RoomMask> segment_rooms(const LayoutImage& floorplan, const Palette& palette) {
  const LabelMap labels = classify_pixels(floorplan, palette);
  const auto& entries = palette.entries();
  const int w = floorplan.width, h = floorplan.height;
  std::vector<char> barrier(labels.labels.size(), 0);
  for (size_t i = 0; i < labels.labels.size(); ++i) {
    const int32_t l = labels.labels[i];
    if (l >= 0 && entries[LabelMap::entry_of(l)].role != Role::kObject) barrier[i] = 1;
  }

  std::vector<int> region_of(labels.labels.size(), -1);
  std::vector<RoomMask> rooms;
  for (int start = 0; start < w * h; ++start) {
    if (barrier[start] || region_of[start] >= 0) continue;
    const int id = static_cast<int>(rooms.size());
    RoomMask room;
    room.pixels.push_back(start);
    region_of[start] = id;
    for (size_t head = 0; head < room.pixels.size(); ++head) {
      const int x = room.pixels[head] % w, y = room.pixels[head] / w;
      if (x == 0 || y == 0 || x == w - 1 || y == h - 1) room.exterior = true;
      constexpr int dx[] = {1, 0, -1, 0}, dy[] = {0, 1, 0, -1};
      for (int k = 0; k < 4; ++k) {
        const int nx = x + dx[k], ny = y + dy[k];
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const int n = ny * w + nx;
        if (barrier[n] || region_of[n] >= 0) continue;
        region_of[n] = id;
        room.pixels.push_back(n);
      }
    }
    rooms.push_back(std::move(room));
  }

  int inner = 0;
  for (size_t i = 0; i < rooms.size(); ++i) {
    RoomMask& r = rooms[i];
    std::sort(r.pixels.begin(), r.pixels.end());
    // Room type by majority vote over gray fills.
    std::map<int, size_t> votes;
    for (int32_t p : r.pixels) {
      const Color c = floorplan.get(p % w, p / w);
      if (std::abs(c[0] - c[1]) > 0.02 || std::abs(c[1] - c[2]) > 0.02) continue;
      const int t = room_type_from_gray(c[0]);
      if (t > 0) ++votes[t];
    }
    r.room_type = -1;
    size_t best = 0;
    for (const auto& [t, n] : votes) {
      if (n > best) {
        best = n;
        r.room_type = t;
      }
    }
    if (r.room_type > 0 && best * 2 < r.pixels.size()) r.room_type = -1;
    r.name = r.exterior ? "exterior" : std::string(room_type_name(r.room_type));
    r.id = r.exterior ? "exterior_" + std::to_string(i) : "room_" + std::to_string(inner++);
    Polygon loop = trace_boundary(region_of, static_cast<int>(i), w, h);
    for (Vec2& v : loop) v = floorplan.transform.to_world(v);
    r.polygon = std::move(loop);
  }
  return rooms;
}

std::vector<RoomMask> segment_rooms(const Scene& scene) {
  std::vector<RoomMask> out;
  for (const Room& r : scene.rooms) {
    RoomMask m;
    m.id = r.id;
    m.name = r.name;
    m.room_type = r.type;
    m.outline = r.is_outline();
    m.polygon = r.wall_points;
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace chord
