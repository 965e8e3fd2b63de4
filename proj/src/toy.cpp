// Copyright 2026 The chord-layout Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <charconv>
#include <sstream>

#include "chord/error.hpp"
#include "chord/rng.hpp"
#include "chord/scene.hpp"

namespace chord {

namespace {

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    fail(ErrorKind::kParse, "toy config: '" + key + "' expects a number, got '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  int out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    fail(ErrorKind::kParse, "toy config: '" + key + "' expects an integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(ErrorKind::kParse, "toy config: '" + key + "' expects true/false, got '" + v + "'");
}

}  // namespace

ToyConfig ToyConfig::parse(std::string_view text) {
  ToyConfig c;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      fail(ErrorKind::kParse, "toy config line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string val = trim(std::string_view(t).substr(eq + 1));
    if (key == "rooms_min") c.rooms_min = to_int(key, val);
    else if (key == "rooms_max") c.rooms_max = to_int(key, val);
    else if (key == "furniture_min") c.furniture_min = to_int(key, val);
    else if (key == "furniture_max") c.furniture_max = to_int(key, val);
    else if (key == "house_min_cm") c.house_min_cm = to_double(key, val);
    else if (key == "house_max_cm") c.house_max_cm = to_double(key, val);
    else if (key == "min_room_cm") c.min_room_cm = to_double(key, val);
    else if (key == "wall_thickness_cm") c.wall_thickness_cm = to_double(key, val);
    else if (key == "min_gap_cm") c.min_gap_cm = to_double(key, val);
    else if (key == "size_jitter") c.size_jitter = to_double(key, val);
    else if (key == "openings") c.openings = to_bool(key, val);
    else if (key == "outline") c.outline = to_bool(key, val);
    else if (key == "force_min_iou") c.force_min_iou = to_double(key, val);
    else if (key == "max_retries") c.max_retries = to_int(key, val);
    else if (key == "min_dim_cm") c.min_dim_cm = to_double(key, val);
    else if (key == "collision_mode") {
      if (val == "forbid") c.collision_mode = CollisionMode::kForbid;
      else if (val == "force") c.collision_mode = CollisionMode::kForce;
      else fail(ErrorKind::kParse, "toy config: collision_mode must be forbid or force");
    } else if (key == "categories") {
      c.categories.clear();
      std::istringstream items(val);
      std::string item;
      while (std::getline(items, item, ',')) {
        if (std::string n = trim(item); !n.empty()) c.categories.push_back(n);
      }
    } else {
      fail(ErrorKind::kParse, "toy config: unknown key '" + key + "'");
    }
  }
  return c;
}

std::string ToyConfig::to_text() const {
  std::ostringstream o;
  o << "rooms_min=" << rooms_min << "\nrooms_max=" << rooms_max
    << "\nfurniture_min=" << furniture_min << "\nfurniture_max=" << furniture_max
    << "\nhouse_min_cm=" << house_min_cm << "\nhouse_max_cm=" << house_max_cm
    << "\nmin_room_cm=" << min_room_cm << "\nwall_thickness_cm=" << wall_thickness_cm
    << "\nmin_gap_cm=" << min_gap_cm << "\nsize_jitter=" << size_jitter
    << "\nopenings=" << (openings ? "true" : "false")
    << "\noutline=" << (outline ? "true" : "false") << "\ncollision_mode="
    << (collision_mode == CollisionMode::kForbid ? "forbid" : "force")
    << "\nforce_min_iou=" << force_min_iou << "\nmax_retries=" << max_retries
    << "\nmin_dim_cm=" << min_dim_cm << "\ncategories=";
  for (size_t i = 0; i < categories.size(); ++i) o << (i ? "," : "") << categories[i];
  o << "\n";
  return o.str();
}

namespace {

struct Rect {
  double x0, y0, x1, y1;
  double w() const { return x1 - x0; }
  double h() const { return y1 - y0; }
};

struct Split {
  bool vertical;  // wall along x = pos
  double pos, lo, hi;
};

double overlap_area(const Aabb& a, const Aabb& b) {
  const double w = std::min(a.max_x, b.max_x) - std::max(a.min_x, b.min_x);
  const double h = std::min(a.max_y, b.max_y) - std::max(a.min_y, b.min_y);
  return (w > 0 && h > 0) ? w * h : 0.0;
}

double aabb_iou(const Aabb& a, const Aabb& b) {
  const double inter = overlap_area(a, b);
  const double uni = a.width() * a.height() + b.width() * b.height() - inter;
  return uni > 0 ? inter / uni : 0.0;
}

bool fits_in(const Aabb& box, const Rect& room, double clearance) {
  return box.min_x >= room.x0 + clearance && box.max_x <= room.x1 - clearance &&
         box.min_y >= room.y0 + clearance && box.max_y <= room.y1 - clearance;
}

void validate_config(const ToyConfig& c) {
  auto bad = [](const std::string& m) { fail(ErrorKind::kArgument, "toy config: " + m); };
  if (c.rooms_min < 1 || c.rooms_max < c.rooms_min) bad("need 1 <= rooms_min <= rooms_max");
  if (c.furniture_min < 0 || c.furniture_max < c.furniture_min) {
    bad("need 0 <= furniture_min <= furniture_max");
  }
  if (!(c.house_min_cm > 0) || c.house_max_cm < c.house_min_cm) {
    bad("need 0 < house_min_cm <= house_max_cm");
  }
  if (!(c.min_room_cm > 0)) bad("min_room_cm must be positive");
  if (c.wall_thickness_cm < 0 || c.min_gap_cm < 0) bad("negative clearance");
  if (c.size_jitter < 0 || c.size_jitter >= 1) bad("size_jitter must be in [0, 1)");
  if (c.max_retries < 1) bad("max_retries must be >= 1");
  if (!(c.force_min_iou > 0) || c.force_min_iou > 1) bad("force_min_iou must be in (0, 1]");
}

}  // namespace

Scene generate_toy_scene(uint64_t seed, const ToyConfig& config) {
  validate_config(config);
  Rng rng(seed);

  std::vector<std::string> pool = config.categories;
  if (pool.empty()) {
    for (const Category& c : house_categories()) {
      if (c.role == Role::kObject) pool.push_back(c.name);
    }
  }

  const double W = std::round(rng.uniform(config.house_min_cm, config.house_max_cm));
  const double H = std::round(rng.uniform(config.house_min_cm, config.house_max_cm));
  std::vector<Rect> rects{{0, 0, W, H}};
  std::vector<Split> splits;

  const int target_rooms = static_cast<int>(rng.uniform_int(config.rooms_min, config.rooms_max));
  while (static_cast<int>(rects.size()) < target_rooms) {
    // Split the largest room that is long enough; stop early if none is.
    int pick = -1;
    double best = 0;
    for (size_t i = 0; i < rects.size(); ++i) {
      const double longest = std::max(rects[i].w(), rects[i].h());
      const double area = rects[i].w() * rects[i].h();
      if (longest >= 2 * config.min_room_cm && area > best) {
        best = area;
        pick = static_cast<int>(i);
      }
    }
    if (pick < 0) break;
    const Rect r = rects[pick];
    const bool vertical = r.w() >= r.h();
    const double span = vertical ? r.w() : r.h();
    const double lo = config.min_room_cm, hi = span - config.min_room_cm;
    const double cut = std::round(std::clamp(span * rng.uniform(0.35, 0.65), lo, hi));
    Rect a = r, b = r;
    if (vertical) {
      a.x1 = b.x0 = r.x0 + cut;
      splits.push_back({true, r.x0 + cut, r.y0, r.y1});
    } else {
      a.y1 = b.y0 = r.y0 + cut;
      splits.push_back({false, r.y0 + cut, r.x0, r.x1});
    }
    rects[pick] = a;
    rects.insert(rects.begin() + pick + 1, b);
  }

  Scene scene;
  for (size_t i = 0; i < rects.size(); ++i) {
    const Rect& r = rects[i];
    Room room;
    room.id = "R" + std::to_string(i);
    room.type = static_cast<int>(i % kRoomTypeCount) + 1;
    room.name = std::string(room_type_name(room.type));
    room.wall_points = {{r.x0, r.y0}, {r.x1, r.y0}, {r.x1, r.y1}, {r.x0, r.y1}};
    scene.rooms.push_back(std::move(room));
  }
  if (config.outline) {
    Room outline;
    outline.id = "OUT";
    outline.name = "out_room";
    outline.type = 0;
    outline.wall_points = {{0, 0}, {W, 0}, {W, H}, {0, H}};
    scene.rooms.push_back(std::move(outline));
  }

  if (config.openings) {
    for (const Split& s : splits) {
      const double span = s.hi - s.lo;
      if (span < 150) continue;
      const double along = std::round(rng.uniform(s.lo + 60, s.hi - 60));
      Opening door;
      door.kind = OpeningKind::kDoor;
      door.pos = s.vertical ? Vec3{s.pos, along, 0} : Vec3{along, s.pos, 0};
      door.length = 90;
      door.width = 12;
      door.height = 210;
      door.rotate = s.vertical ? 90.0 : 0.0;
      scene.openings.push_back(door);
    }
    for (const Rect& r : rects) {
      struct Edge {
        bool vertical;
        double pos, lo, hi;
      };
      std::vector<Edge> outer;
      if (r.y0 == 0) outer.push_back({false, 0, r.x0, r.x1});
      if (r.y1 == H) outer.push_back({false, H, r.x0, r.x1});
      if (r.x0 == 0) outer.push_back({true, 0, r.y0, r.y1});
      if (r.x1 == W) outer.push_back({true, W, r.y0, r.y1});
      if (outer.empty()) continue;
      const Edge e = outer[rng.uniform_int(0, static_cast<int64_t>(outer.size()) - 1)];
      const double len = std::min(150.0, e.hi - e.lo - 80);
      if (len < 60) continue;
      const double along = std::round(rng.uniform(e.lo + 40 + len / 2, e.hi - 40 - len / 2));
      Opening win;
      win.kind = OpeningKind::kWindow;
      win.pos = e.vertical ? Vec3{e.pos, along, 90} : Vec3{along, e.pos, 90};
      win.length = len;
      win.width = 12;
      win.height = 110;
      win.rotate = e.vertical ? 90.0 : 0.0;
      scene.openings.push_back(win);
    }
  }

  const double clearance = config.wall_thickness_cm / 2 + config.min_gap_cm;
  const bool force = config.collision_mode == CollisionMode::kForce;
  const size_t victim_room =
      force ? static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(rects.size()) - 1)) : 0;

  auto sample_box = [&](const std::string& category) {
    const Vec3 nominal = nominal_size(category);
    auto jitter = [&](double v) {
      return std::round(v * (1.0 + config.size_jitter * rng.uniform(-1.0, 1.0)));
    };
    OrientedBox box;
    box.category = category;
    box.length = std::max(config.min_dim_cm, jitter(nominal.x));
    box.width = std::max(config.min_dim_cm, jitter(nominal.y));
    box.height = std::max(1.0, jitter(nominal.z));
    box.rotate = 90.0 * static_cast<double>(rng.uniform_int(0, 3));
    return box;
  };
  auto pick_category = [&]() {
    return pool[rng.uniform_int(0, static_cast<int64_t>(pool.size()) - 1)];
  };

  std::vector<size_t> room_of;
  for (size_t ri = 0; ri < rects.size(); ++ri) {
    const Rect& r = rects[ri];
    int count = static_cast<int>(rng.uniform_int(config.furniture_min, config.furniture_max));
    if (force && ri == victim_room) count = std::max(1, count - 1);
    for (int k = 0; k < count; ++k) {
      bool placed = false;
      for (int attempt = 0; attempt < config.max_retries && !placed; ++attempt) {
        OrientedBox box = sample_box(pick_category());
        const bool swapped = static_cast<int>(box.rotate) % 180 != 0;
        const double hx = (swapped ? box.width : box.length) / 2;
        const double hy = (swapped ? box.length : box.width) / 2;
        const double xlo = r.x0 + clearance + hx, xhi = r.x1 - clearance - hx;
        const double ylo = r.y0 + clearance + hy, yhi = r.y1 - clearance - hy;
        if (xlo > xhi || ylo > yhi) continue;
        box.pos = {std::round(rng.uniform(xlo, xhi) * 10) / 10,
                   std::round(rng.uniform(ylo, yhi) * 10) / 10, 0};
        const Aabb bb = box.bounds();
        if (!fits_in(bb, r, clearance - 1e-9)) continue;
        bool clash = false;
        for (const OrientedBox& other : scene.furniture) {
          Aabb ob = other.bounds();
          ob.min_x -= config.min_gap_cm;
          ob.min_y -= config.min_gap_cm;
          ob.max_x += config.min_gap_cm;
          ob.max_y += config.min_gap_cm;
          if (bb.min_x < ob.max_x && ob.min_x < bb.max_x && bb.min_y < ob.max_y &&
              ob.min_y < bb.max_y) {
            clash = true;
            break;
          }
        }
        if (clash) continue;
        scene.furniture.push_back(std::move(box));
        room_of.push_back(ri);
        placed = true;
      }
      if (!placed) {
        fail(ErrorKind::kPlacement, "could not place object " + std::to_string(k + 1) + " of " +
                                        std::to_string(count) + " in room " +
                                        scene.rooms[ri].id + " after " +
                                        std::to_string(config.max_retries) + " retries");
      }
    }
  }

  if (force) {
    std::vector<size_t> candidates;
    for (size_t i = 0; i < scene.furniture.size(); ++i) {
      if (room_of[i] == victim_room) candidates.push_back(i);
    }
    if (candidates.empty()) {
      fail(ErrorKind::kPlacement, "force mode needs at least one object in the victim room");
    }
    const OrientedBox victim =
        scene.furniture[candidates[rng.uniform_int(0, static_cast<int64_t>(candidates.size()) - 1)]];
    const Rect& r = rects[victim_room];
    const Aabb vb = victim.bounds();
    std::string other_category = victim.category;
    for (int guard = 0; guard < 64 && other_category == victim.category && pool.size() > 1; ++guard) {
      other_category = pick_category();
    }

    std::optional<OrientedBox> collider;
    for (int attempt = 0; attempt < config.max_retries && !collider; ++attempt) {
      OrientedBox box = sample_box(other_category);
      box.pos = {std::round((victim.pos.x + rng.uniform(-0.4, 0.4) * vb.width()) * 10) / 10,
                 std::round((victim.pos.y + rng.uniform(-0.4, 0.4) * vb.height()) * 10) / 10, 0};
      const Aabb bb = box.bounds();
      if (!fits_in(bb, r, config.wall_thickness_cm / 2)) continue;
      if (aabb_iou(bb, vb) < config.force_min_iou) continue;
      collider = box;
    }
    if (!collider) {
      // Same footprint as the victim always satisfies the IoU bound.
      OrientedBox box = victim;
      box.category = other_category;
      collider = box;
    }
    scene.furniture.push_back(*collider);
  }
  return scene;
}

}  // namespace chord
