// Copyright 2026 The chord-layout Authors
// SPDX-License-Identifier: Apache-2.0

#include "chord/scene.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include "json.hpp"
#include <sstream>

#include "chord/error.hpp"

namespace chord {

std::string_view room_type_name(int type) {
  static constexpr std::string_view kNames[] = {"living",   "bedroom", "kitchen",
                                                "bathroom", "balcony", "study"};
  if (type == 0) return "out_room";
  if (type >= 1 && type <= kRoomTypeCount) return kNames[type - 1];
  return "unknown";
}

using nlohmann::json;

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return "parse_error";
    case ErrorKind::kSchema: return "schema_error";
    case ErrorKind::kType: return "type_error";
    case ErrorKind::kValidation: return "validation_error";
    case ErrorKind::kPalette: return "palette_error";
    case ErrorKind::kTransform: return "transform_error";
    case ErrorKind::kPlacement: return "placement_error";
    case ErrorKind::kTensor: return "tensor_error";
    case ErrorKind::kNumeric: return "numeric_error";
    case ErrorKind::kIo: return "io_error";
    case ErrorKind::kArgument: return "argument_error";
  }
  return "error";
}

// ---------------------------------------------------------------------------
// Categories
// ---------------------------------------------------------------------------

std::optional<Rgb8> parse_hex_color(std::string_view hex) {
  if (!hex.empty() && hex.front() == '#') hex.remove_prefix(1);
  if (hex.size() != 6) return std::nullopt;
  uint8_t v[3];
  for (int i = 0; i < 3; ++i) {
    int acc = 0;
    for (int k = 0; k < 2; ++k) {
      const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(hex[2 * i + k])));
      int d;
      if (c >= '0' && c <= '9') d = c - '0';
      else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
      else return std::nullopt;
      acc = acc * 16 + d;
    }
    v[i] = static_cast<uint8_t>(acc);
  }
  return Rgb8{v[0], v[1], v[2]};
}

std::string to_hex(Rgb8 c) {
  static const char* digits = "0123456789ABCDEF";
  std::string s(6, '0');
  const uint8_t v[3] = {c.r, c.g, c.b};
  for (int i = 0; i < 3; ++i) {
    s[2 * i] = digits[v[i] >> 4];
    s[2 * i + 1] = digits[v[i] & 15];
  }
  return s;
}

namespace {

Category make(const char* name, const char* hex, Level level, Role role = Role::kObject) {
  return Category{name, level, role, *parse_hex_color(hex)};
}

}  // namespace

const std::vector<Category>& house_categories() {
  static const std::vector<Category> table = [] {
    const Level h = Level::kHouse;
    return std::vector<Category>{
        make("bed", "FF0000", h),
        make("cabinet", "FFFF00", h),
        make("bed_background", "FF3333", h),
        make("bedside_table", "F08080", h),
        make("table", "A52A2A", h),
        make("leisure_sofa", "666600", h),
        make("sofa", "FF9933", h),
        make("tv_cabinet", "FFCC99", h),
        make("sofa_background", "99004C", h),
        make("coffee_table", "CCFF99", h),
        make("dining_cabinet", "FF9999", h),
        make("shoe_cabinet", "006633", h),
        make("single_sofa", "CC6600", h),
        make("dining_table", "FF6666", h),
        make("side_coffee_table", "99FFCC", h),
        make("single_door_floor_cabinet", "9999FF", h),
        make("double_door_floor_cabinet", "6666FF", h),
        make("cooker_cabinet", "000099", h),
        make("sink_cabinet", "0000CC", h),
        make("electrical_floor_cabinet", "3333FF", h),
        make("refrigerator", "006666", h),
        make("shower", "33FF99", h),
        make("toilet", "660033", h),
        make("washbasin", "CC0066", h),
        make("washing_machine", "FFCCE5", h),
        make("washing_set", "FF66B2", h),
        make("wall", "000000", h, Role::kWall),
        make("door", "139C5A", h, Role::kDoor),
        make("window", "0000FF", h, Role::kWindow),
    };
  }();
  return table;
}

const std::vector<Category>& fine_categories() {
  static const std::vector<Category> table = [] {
    const Level f = Level::kFine;
    return std::vector<Category>{
        make("bedside_table", "F08080", f),
        make("table", "A52A2A", f),
        make("coffee_table", "CCFF99", f),
        make("side_coffee_table", "99FFCC", f),
        make("dining_table", "FF6666", f),
        make("lying_book", "0000FF", f),
        make("standing_book", "FFFFAA", f),
        make("magazine", "7FFFAA", f),
        make("all_in_one_computer", "00FFAA", f),
        make("laptop", "FF7FAA", f),
        make("big_mouse_pad", "7F7FAA", f),
        make("table_lamp", "007FAA", f),
        make("small_ornament", "FF00AA", f),
        make("pen_holder", "7F00AA", f),
        make("big_plant", "0000AA", f),
        make("small_plant", "FFFF55", f),
        make("coffee_cup", "7FFF55", f),
        make("electronic", "FF0000", f),
        make("photo_frame", "FF7F55", f),
        make("food", "7F7F55", f),
        make("dinner_set", "FFFF00", f),
        make("drinks", "7F7F00", f),
    };
  }();
  return table;
}

bool is_fine_parent(std::string_view category) {
  return category == "bedside_table" || category == "table" ||
         category == "coffee_table" || category == "side_coffee_table" ||
         category == "dining_table";
}

Vec3 nominal_size(std::string_view c) {
  struct Entry {
    std::string_view name;
    Vec3 size;
  };
  static constexpr Entry kSizes[] = {
      {"bed", {180, 210, 50}},
      {"cabinet", {120, 60, 200}},
      {"bed_background", {200, 40, 120}},
      {"bedside_table", {50, 45, 55}},
      {"table", {120, 60, 75}},
      {"leisure_sofa", {90, 85, 80}},
      {"sofa", {220, 95, 85}},
      {"tv_cabinet", {180, 45, 50}},
      {"sofa_background", {260, 40, 120}},
      {"coffee_table", {120, 60, 45}},
      {"dining_cabinet", {150, 45, 90}},
      {"shoe_cabinet", {100, 40, 110}},
      {"single_sofa", {90, 90, 85}},
      {"dining_table", {160, 90, 75}},
      {"side_coffee_table", {55, 55, 55}},
      {"single_door_floor_cabinet", {60, 60, 200}},
      {"double_door_floor_cabinet", {120, 60, 200}},
      {"cooker_cabinet", {90, 60, 85}},
      {"sink_cabinet", {90, 60, 85}},
      {"electrical_floor_cabinet", {60, 60, 180}},
      {"refrigerator", {70, 70, 180}},
      {"shower", {100, 100, 200}},
      {"toilet", {45, 70, 75}},
      {"washbasin", {60, 50, 85}},
      {"washing_machine", {60, 60, 85}},
      {"washing_set", {80, 50, 90}},
      {"lying_book", {25, 18, 3}},
      {"standing_book", {20, 6, 25}},
      {"magazine", {28, 21, 1}},
      {"all_in_one_computer", {55, 20, 45}},
      {"laptop", {35, 25, 2}},
      {"big_mouse_pad", {80, 30, 1}},
      {"table_lamp", {20, 20, 45}},
      {"small_ornament", {10, 10, 15}},
      {"pen_holder", {8, 8, 12}},
      {"big_plant", {40, 40, 80}},
      {"small_plant", {15, 15, 20}},
      {"coffee_cup", {9, 9, 10}},
      {"electronic", {15, 8, 2}},
      {"photo_frame", {20, 6, 15}},
      {"food", {20, 20, 8}},
      {"dinner_set", {30, 30, 5}},
      {"drinks", {8, 8, 25}},
  };
  for (const Entry& e : kSizes) {
    if (e.name == c) return e.size;
  }
  return {80, 60, 80};
}

// ---------------------------------------------------------------------------
// Geometry of records
// ---------------------------------------------------------------------------

namespace {

Quad box_corners(Vec2 c, double length, double width, double rotate_deg) {
  const double hx = length / 2, hy = width / 2;
  const Vec2 local[4] = {{-hx, -hy}, {hx, -hy}, {hx, hy}, {-hx, hy}};
  Quad q;
  for (int i = 0; i < 4; ++i) q[i] = c + rotate(local[i], rotate_deg);
  return q;
}

}  // namespace

Quad OrientedBox::footprint() const { return box_corners(center(), length, width, rotate); }

Quad Opening::footprint() const { return box_corners({pos.x, pos.y}, length, width, rotate); }

Aabb OrientedBox::bounds() const {
  Aabb b = Aabb::empty_box();
  for (const Vec2& p : footprint()) b.expand(p);
  return b;
}

Aabb scene_bounds(const Scene& s) {
  Aabb b = Aabb::empty_box();
  for (const Room& r : s.rooms)
    for (const Vec2& p : r.wall_points) b.expand(p);
  for (const Opening& o : s.openings)
    for (const Vec2& p : o.footprint()) b.expand(p);
  for (const OrientedBox& f : s.furniture) b.expand(f.bounds());
  return b;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

std::string child(const std::string& path, std::string_view key) {
  return path + "/" + std::string(key);
}
std::string child(const std::string& path, size_t index) {
  return path + "/" + std::to_string(index);
}

const json& require_key(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) fail(ErrorKind::kType, "expected object at " + (path.empty() ? "/" : path));
  auto it = obj.find(key);
  if (it == obj.end()) {
    fail(ErrorKind::kSchema,
         "missing required key '" + std::string(key) + "' at " + (path.empty() ? "/" : path));
  }
  return *it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(ErrorKind::kType, "expected number at " + path);
  return v.get<double>();
}

const json& as_array(const json& v, const std::string& path) {
  if (!v.is_array()) fail(ErrorKind::kType, "expected array at " + path);
  return v;
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(ErrorKind::kType, "expected string at " + path);
  return v.get<std::string>();
}

Vec3 parse_pos(const json& v, const std::string& path) {
  const json& a = as_array(v, path);
  if (a.size() < 2 || a.size() > 3) {
    fail(ErrorKind::kType, "expected 2 or 3 coordinates at " + path);
  }
  Vec3 p;
  p.x = as_number(a[0], child(path, 0));
  p.y = as_number(a[1], child(path, 1));
  if (a.size() == 3) p.z = as_number(a[2], child(path, 2));
  return p;
}

struct BoxFields {
  std::string type;
  Vec3 pos;
  double length, width, height, rotate;
};

BoxFields parse_box(const json& item, const std::string& path) {
  BoxFields f;
  f.type = as_string(require_key(item, "type", path), child(path, "type"));
  f.pos = parse_pos(require_key(item, "pos", path), child(path, "pos"));
  f.length = as_number(require_key(item, "length", path), child(path, "length"));
  f.width = as_number(require_key(item, "width", path), child(path, "width"));
  f.height = as_number(require_key(item, "height", path), child(path, "height"));
  f.rotate = 0.0;
  if (auto it = item.find("rotate"); it != item.end()) {
    f.rotate = as_number(*it, child(path, "rotate"));
  }
  if (std::isfinite(f.rotate)) f.rotate = normalize_degrees(f.rotate);
  return f;
}

json box_json(const std::string& type, const Vec3& pos, double l, double w, double h, double r) {
  json j;
  j["type"] = type;
  j["pos"] = {pos.x, pos.y, pos.z};
  j["length"] = l;
  j["width"] = w;
  j["height"] = h;
  j["rotate"] = r;
  return j;
}

}  // namespace

Scene parse_scene(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kParse, "malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }

  Scene scene;
  const std::string root;
  const json& rooms = as_array(require_key(doc, "rooms", root), "/rooms");
  const json& openings = as_array(require_key(doc, "windowsDoors", root), "/windowsDoors");
  const json& furniture = as_array(require_key(doc, "furniture", root), "/furniture");

  for (size_t i = 0; i < rooms.size(); ++i) {
    const std::string path = child("/rooms", i);
    const json& r = rooms[i];
    Room room;
    if (!r.is_object()) fail(ErrorKind::kType, "expected object at " + path);
    if (auto it = r.find("roomId"); it != r.end()) room.id = as_string(*it, child(path, "roomId"));
    if (auto it = r.find("roomName"); it != r.end()) room.name = as_string(*it, child(path, "roomName"));
    if (auto it = r.find("roomType"); it != r.end()) {
      room.type = static_cast<int>(as_number(*it, child(path, "roomType")));
    }
    const std::string wp = child(path, "wallPoints");
    const json& pts = as_array(require_key(r, "wallPoints", path), wp);
    for (size_t k = 0; k < pts.size(); ++k) {
      const std::string pp = child(wp, k);
      const json& p = as_array(pts[k], pp);
      if (p.size() != 2) fail(ErrorKind::kType, "expected [x, y] at " + pp);
      room.wall_points.push_back({as_number(p[0], child(pp, 0)), as_number(p[1], child(pp, 1))});
    }
    scene.rooms.push_back(std::move(room));
  }

  for (size_t i = 0; i < openings.size(); ++i) {
    const std::string path = child("/windowsDoors", i);
    const BoxFields f = parse_box(openings[i], path);
    Opening o;
    if (f.type == "door") {
      o.kind = OpeningKind::kDoor;
    } else if (f.type == "window") {
      o.kind = OpeningKind::kWindow;
    } else {
      fail(ErrorKind::kValidation, "expected \"door\" or \"window\" at " + child(path, "type"));
    }
    o.pos = f.pos;
    o.length = f.length;
    o.width = f.width;
    o.height = f.height;
    o.rotate = f.rotate;
    scene.openings.push_back(o);
  }

  for (size_t i = 0; i < furniture.size(); ++i) {
    const BoxFields f = parse_box(furniture[i], child("/furniture", i));
    scene.furniture.push_back({f.type, f.pos, f.length, f.width, f.height, f.rotate});
  }
  return scene;
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open scene file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scene(ss.str());
}

std::string serialize_scene(const Scene& scene, int indent) {
  json doc;
  doc["rooms"] = json::array();
  doc["windowsDoors"] = json::array();
  doc["furniture"] = json::array();
  for (const Room& r : scene.rooms) {
    json j;
    j["roomId"] = r.id;
    j["roomName"] = r.name;
    j["roomType"] = r.type;
    j["wallPoints"] = json::array();
    for (const Vec2& p : r.wall_points) j["wallPoints"].push_back({p.x, p.y});
    doc["rooms"].push_back(std::move(j));
  }
  for (const Opening& o : scene.openings) {
    doc["windowsDoors"].push_back(box_json(o.kind == OpeningKind::kDoor ? "door" : "window",
                                           o.pos, o.length, o.width, o.height, o.rotate));
  }
  for (const OrientedBox& f : scene.furniture) {
    doc["furniture"].push_back(box_json(f.category, f.pos, f.length, f.width, f.height, f.rotate));
  }
  return doc.dump(indent);
}

namespace {

bool near(double a, double b, double tol) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  return std::abs(a - b) <= tol;
}
bool near(const Vec3& a, const Vec3& b, double tol) {
  return near(a.x, b.x, tol) && near(a.y, b.y, tol) && near(a.z, b.z, tol);
}

}  // namespace

bool scenes_equal(const Scene& a, const Scene& b, double tol) {
  if (a.rooms.size() != b.rooms.size() || a.openings.size() != b.openings.size() ||
      a.furniture.size() != b.furniture.size()) {
    return false;
  }
  for (size_t i = 0; i < a.rooms.size(); ++i) {
    const Room &x = a.rooms[i], &y = b.rooms[i];
    if (x.id != y.id || x.name != y.name || x.type != y.type ||
        x.wall_points.size() != y.wall_points.size()) {
      return false;
    }
    for (size_t k = 0; k < x.wall_points.size(); ++k) {
      if (!near(x.wall_points[k].x, y.wall_points[k].x, tol) ||
          !near(x.wall_points[k].y, y.wall_points[k].y, tol)) {
        return false;
      }
    }
  }
  for (size_t i = 0; i < a.openings.size(); ++i) {
    const Opening &x = a.openings[i], &y = b.openings[i];
    if (x.kind != y.kind || !near(x.pos, y.pos, tol) || !near(x.length, y.length, tol) ||
        !near(x.width, y.width, tol) || !near(x.height, y.height, tol) ||
        !near(x.rotate, y.rotate, tol)) {
      return false;
    }
  }
  for (size_t i = 0; i < a.furniture.size(); ++i) {
    const OrientedBox &x = a.furniture[i], &y = b.furniture[i];
    if (x.category != y.category || !near(x.pos, y.pos, tol) || !near(x.length, y.length, tol) ||
        !near(x.width, y.width, tol) || !near(x.height, y.height, tol) ||
        !near(x.rotate, y.rotate, tol)) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

const char* violation_code_name(ViolationCode code) {
  switch (code) {
    case ViolationCode::kDegenerateRoom: return "degenerate_room";
    case ViolationCode::kBadDimension: return "bad_dimension";
    case ViolationCode::kNonFinite: return "non_finite";
    case ViolationCode::kOutsideRooms: return "outside_room_boundaries";
    case ViolationCode::kEmptyRoom: return "empty_room";
    case ViolationCode::kUnknownCategory: return "unknown_category";
  }
  return "unknown";
}

size_t ValidationReport::count(ViolationCode code) const {
  return static_cast<size_t>(std::count_if(violations.begin(), violations.end(),
                                           [&](const Violation& v) { return v.code == code; }));
}

std::string ValidationReport::to_json() const {
  json j;
  j["ok"] = ok();
  j["violations"] = json::array();
  for (const Violation& v : violations) {
    j["violations"].push_back(
        {{"code", violation_code_name(v.code)}, {"subject", v.subject}, {"message", v.message}});
  }
  return j.dump(2);
}

ValidationReport validate_scene(const Scene& scene) {
  std::vector<std::string> known;
  for (const Category& c : house_categories()) {
    if (c.role == Role::kObject) known.push_back(c.name);
  }
  return validate_scene(scene, known);
}

ValidationReport validate_scene(const Scene& scene, const std::vector<std::string>& known) {
  ValidationReport report;
  auto add = [&](ViolationCode code, std::string subject, std::string message) {
    report.violations.push_back({code, std::move(subject), std::move(message)});
  };

  std::vector<bool> usable(scene.rooms.size(), false);
  for (size_t i = 0; i < scene.rooms.size(); ++i) {
    const Room& r = scene.rooms[i];
    const std::string subject = "rooms[" + std::to_string(i) + "]";
    bool finite = true;
    for (const Vec2& p : r.wall_points) finite = finite && std::isfinite(p.x) && std::isfinite(p.y);
    if (!finite) {
      add(ViolationCode::kNonFinite, subject, "non-finite wall point");
      continue;
    }
    if (r.wall_points.size() < 3) {
      add(ViolationCode::kDegenerateRoom, subject, "wall loop has fewer than 3 points");
    } else if (std::abs(signed_area(r.wall_points)) <= 1e-9) {
      add(ViolationCode::kDegenerateRoom, subject, "wall loop has zero area");
    } else if (!is_simple_polygon(r.wall_points)) {
      add(ViolationCode::kDegenerateRoom, subject, "wall loop is not a simple polygon");
    } else {
      usable[i] = true;
    }
  }

  for (size_t i = 0; i < scene.openings.size(); ++i) {
    const Opening& o = scene.openings[i];
    const std::string subject = "windowsDoors[" + std::to_string(i) + "]";
    if (!std::isfinite(o.pos.x) || !std::isfinite(o.pos.y) || !std::isfinite(o.pos.z) ||
        !std::isfinite(o.rotate)) {
      add(ViolationCode::kNonFinite, subject, "non-finite position or rotation");
    }
    if (!(o.length > 0) || !(o.width > 0) || !(o.height > 0)) {
      add(ViolationCode::kBadDimension, subject, "length, width and height must be positive");
    }
  }

  std::vector<bool> occupied(scene.rooms.size(), false);
  for (size_t i = 0; i < scene.furniture.size(); ++i) {
    const OrientedBox& f = scene.furniture[i];
    const std::string subject = "furniture[" + std::to_string(i) + "]";
    if (std::find(known.begin(), known.end(), f.category) == known.end()) {
      add(ViolationCode::kUnknownCategory, subject, "unknown category '" + f.category + "'");
    }
    if (!(f.length > 0) || !(f.width > 0) || !(f.height > 0)) {
      add(ViolationCode::kBadDimension, subject, "length, width and height must be positive");
    }
    if (!std::isfinite(f.pos.x) || !std::isfinite(f.pos.y) || !std::isfinite(f.pos.z) ||
        !std::isfinite(f.rotate)) {
      add(ViolationCode::kNonFinite, subject, "non-finite position or rotation");
      continue;
    }
    bool inside_any = false;
    for (size_t r = 0; r < scene.rooms.size(); ++r) {
      if (!usable[r]) continue;
      if (point_in_polygon(f.center(), scene.rooms[r].wall_points)) {
        inside_any = true;
        occupied[r] = true;
      }
    }
    if (!inside_any) {
      add(ViolationCode::kOutsideRooms, subject, "footprint centroid lies outside every room");
    }
  }

  for (size_t r = 0; r < scene.rooms.size(); ++r) {
    if (usable[r] && !occupied[r] && !scene.rooms[r].is_outline()) {
      add(ViolationCode::kEmptyRoom, "rooms[" + std::to_string(r) + "]",
          "no furniture centroid inside room '" + scene.rooms[r].name + "'");
    }
  }
  return report;
}

}  // namespace chord
