// Copyright 2026 The chord-layout Authors
// SPDX-License-Identifier: Apache-2.0

#include "chord/scenegraph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "chord/error.hpp"
#include "json.hpp"

namespace chord {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// JSON helpers
// ---------------------------------------------------------------------------

json parse_text(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kParse, "malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

const json& member(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) fail(ErrorKind::kType, "expected an object at " + (path.empty() ? "/" : path));
  auto it = obj.find(key);
  if (it == obj.end()) fail(ErrorKind::kSchema, "missing key '" + std::string(key) + "' at " + (path.empty() ? "/" : path));
  return *it;
}

double number_at(const json& obj, const char* key, const std::string& path) {
  const json& v = member(obj, key, path);
  if (!v.is_number()) fail(ErrorKind::kType, "expected a number at " + path + "/" + key);
  return v.get<double>();
}

std::string string_at(const json& obj, const char* key, const std::string& path) {
  const json& v = member(obj, key, path);
  if (!v.is_string()) fail(ErrorKind::kType, "expected a string at " + path + "/" + key);
  return v.get<std::string>();
}

const json& array_at(const json& obj, const char* key, const std::string& path) {
  const json& v = member(obj, key, path);
  if (!v.is_array()) fail(ErrorKind::kType, "expected an array at " + path + "/" + key);
  return v;
}

std::vector<std::string> strings_at(const json& obj, const char* key, const std::string& path) {
  std::vector<std::string> out;
  const json& a = array_at(obj, key, path);
  for (size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_string()) fail(ErrorKind::kType, "expected a string at " + path + "/" + key + "/" + std::to_string(i));
    out.push_back(a[i].get<std::string>());
  }
  return out;
}

Vec3 vec3_at(const json& obj, const char* key, const std::string& path) {
  const json& a = array_at(obj, key, path);
  if (a.size() != 3 || !a[0].is_number() || !a[1].is_number() || !a[2].is_number()) {
    fail(ErrorKind::kType, "expected [x, y, z] at " + path + "/" + key);
  }
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

}  // namespace

// ---------------------------------------------------------------------------
// Assets
// ---------------------------------------------------------------------------

AssetDatabase::AssetDatabase(std::string id, std::vector<AssetRef> entries)
    : id_(std::move(id)), entries_(std::move(entries)) {
  std::set<std::string> seen;
  for (size_t i = 0; i < entries_.size(); ++i) {
    AssetRef& a = entries_[i];
    if (!seen.insert(a.asset_id).second) {
      fail(ErrorKind::kValidation, "duplicate asset id '" + a.asset_id + "'");
    }
    for (double d : {a.length, a.width, a.height}) {
      if (!(d > 0.0) || !std::isfinite(d)) {
        fail(ErrorKind::kValidation, "asset '" + a.asset_id + "' needs positive finite dimensions");
      }
    }
    a.source = id_;
    index_[a.category].push_back(i);
  }
  for (auto& [cat, idx] : index_) {
    std::sort(idx.begin(), idx.end(),
              [&](size_t a, size_t b) { return entries_[a].asset_id < entries_[b].asset_id; });
  }
}

AssetDatabase AssetDatabase::from_json(std::string_view text, std::string id) {
  const json doc = parse_text(text);
  const json* list = &doc;
  std::string base;
  if (doc.is_object()) {
    if (auto it = doc.find("id"); it != doc.end()) {
      if (!it->is_string()) fail(ErrorKind::kType, "expected a string at /id");
      id = it->get<std::string>();
    }
    list = &array_at(doc, "assets", "");
    base = "/assets";
  } else if (!doc.is_array()) {
    fail(ErrorKind::kType, "expected an asset list at /");
  }
  std::vector<AssetRef> entries;
  for (size_t i = 0; i < list->size(); ++i) {
    const std::string path = base + "/" + std::to_string(i);
    const json& e = (*list)[i];
    AssetRef a;
    a.asset_id = string_at(e, "id", path);
    a.category = string_at(e, "category", path);
    a.length = number_at(e, "length", path);
    a.width = number_at(e, "width", path);
    a.height = number_at(e, "height", path);
    entries.push_back(std::move(a));
  }
  return AssetDatabase(std::move(id), std::move(entries));
}

AssetDatabase AssetDatabase::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open asset database '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::string AssetDatabase::to_json() const {
  json doc;
  doc["id"] = id_;
  doc["assets"] = json::array();
  for (const AssetRef& a : entries_) {
    doc["assets"].push_back({{"id", a.asset_id},
                             {"category", a.category},
                             {"length", a.length},
                             {"width", a.width},
                             {"height", a.height}});
  }
  return doc.dump(2);
}

const std::vector<size_t>& AssetDatabase::by_category(std::string_view category) const {
  static const std::vector<size_t> kNone;
  auto it = index_.find(category);
  return it == index_.end() ? kNone : it->second;
}

std::optional<AssetRef> retrieve_asset(const OrientedBox& o, const AssetDatabase& db) {
  const AssetRef* best = nullptr;
  double best_cost = 0.0;
  // Candidates come in id order, so a strict comparison keeps the smallest id on ties.
  for (size_t i : db.by_category(o.category)) {
    const AssetRef& e = db.entries()[i];
    const double dl = o.length - e.length;
    const double dw = o.width - e.width;
    const double cost = dl * dl + dw * dw;
    if (!best || cost < best_cost) {
      best = &e;
      best_cost = cost;
    }
  }
  if (!best) return std::nullopt;
  return *best;
}

// ---------------------------------------------------------------------------
// Straightening
// ---------------------------------------------------------------------------

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// Mean written as min + mean offset so a group of equal values keeps its
// value bit for bit.
double stable_mean(const std::vector<double>& v) {
  const double lo = *std::min_element(v.begin(), v.end());
  double acc = 0.0;
  for (double x : v) acc += x - lo;
  return lo + acc / static_cast<double>(v.size());
}

// Snaps one coordinate axis. `linked[i]` joins vertex i and i + 1.
std::vector<double> snap_axis(const std::vector<double>& coord, const std::vector<bool>& linked,
                              double tol) {
  const int n = static_cast<int>(coord.size());
  UnionFind uf(n);
  for (int i = 0; i < n; ++i) {
    if (linked[i]) uf.unite(i, (i + 1) % n);
  }
  std::vector<int> roots;
  std::vector<std::vector<int>> members(n);
  for (int i = 0; i < n; ++i) {
    members[uf.find(i)].push_back(i);
  }
  // Only groups that carry an axis edge take part in merging; a vertex with
  // free edges on both sides keeps its own coordinate.
  struct Group {
    double value;
    std::vector<int> idx;
  };
  std::vector<Group> groups;
  for (int r = 0; r < n; ++r) {
    if (members[r].size() < 2) continue;
    std::vector<double> v;
    for (int i : members[r]) v.push_back(coord[i]);
    groups.push_back({stable_mean(v), members[r]});
  }
  std::sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) {
    return a.value < b.value || (a.value == b.value && a.idx.front() < b.idx.front());
  });
  std::vector<double> out = coord;
  size_t g = 0;
  while (g < groups.size()) {
    // Chain groups whose coordinates come within tol of each other.
    std::vector<double> vals;
    std::vector<int> idx;
    double hi = -INFINITY;
    size_t k = g;
    while (k < groups.size()) {
      double lo_k = INFINITY;
      for (int i : groups[k].idx) lo_k = std::min(lo_k, coord[i]);
      if (k > g && lo_k - hi > tol) break;
      for (int i : groups[k].idx) {
        vals.push_back(coord[i]);
        idx.push_back(i);
        hi = std::max(hi, coord[i]);
      }
      ++k;
    }
    const double m = stable_mean(vals);
    for (int i : idx) out[i] = m;
    g = k;
  }
  return out;
}

Polygon drop_redundant(Polygon p) {
  bool changed = true;
  while (changed && p.size() >= 3) {
    changed = false;
    for (size_t i = 0; i < p.size() && p.size() >= 3; ++i) {
      const Vec2 a = p[(i + p.size() - 1) % p.size()];
      const Vec2 b = p[i];
      const Vec2 c = p[(i + 1) % p.size()];
      if (a == b || cross(b - a, c - b) == 0.0) {
        p.erase(p.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  return p;
}

Polygon straighten_once(const Polygon& in, const StraightenOptions& opt) {
  // Merge runs of vertices closer than snap_tol; the first of each run stays.
  Polygon p;
  for (const Vec2& v : in) {
    if (p.empty() || norm(v - p.back()) > opt.snap_tol_cm) p.push_back(v);
  }
  while (p.size() > 1 && norm(p.front() - p.back()) <= opt.snap_tol_cm) p.pop_back();
  if (p.size() < 3) return p;

  const size_t n = p.size();
  std::vector<bool> horizontal(n), vertical(n);
  for (size_t i = 0; i < n; ++i) {
    const Vec2 d = p[(i + 1) % n] - p[i];
    double a = std::fmod(std::abs(rad2deg(std::atan2(d.y, d.x))), 180.0);
    horizontal[i] = std::min(a, 180.0 - a) <= opt.angle_tol_deg;
    vertical[i] = std::abs(a - 90.0) <= opt.angle_tol_deg;
  }
  std::vector<double> xs(n), ys(n);
  for (size_t i = 0; i < n; ++i) {
    xs[i] = p[i].x;
    ys[i] = p[i].y;
  }
  xs = snap_axis(xs, vertical, opt.snap_tol_cm);
  ys = snap_axis(ys, horizontal, opt.snap_tol_cm);
  for (size_t i = 0; i < n; ++i) p[i] = {xs[i], ys[i]};
  return drop_redundant(std::move(p));
}

}  // namespace

StraightenResult straighten_polygon(const Polygon& points, const StraightenOptions& options) {
  if (points.size() < 3) fail(ErrorKind::kArgument, "polygon needs at least 3 vertices");
  Polygon cur = points;
  bool converged = false;
  for (int pass = 0; pass < 16; ++pass) {
    Polygon next = straighten_once(cur, options);
    if (next == cur) {
      converged = true;
      break;
    }
    cur = std::move(next);
  }
  const double a0 = signed_area(points);
  const bool ok = converged && cur.size() >= 3 && is_simple_polygon(cur) &&
                  signed_area(cur) * a0 > 0.0;
  if (!ok) return {points, true};
  return {std::move(cur), false};
}

// ---------------------------------------------------------------------------
// Openings and assignment
// ---------------------------------------------------------------------------

std::vector<AttachedOpening> attach_openings(const std::vector<Opening>& openings,
                                             const std::vector<Polygon>& rooms,
                                             double max_dist_cm) {
  std::vector<AttachedOpening> out;
  for (const Opening& o : openings) {
    AttachedOpening r;
    r.original = o;
    r.opening = o;
    const Vec2 c{o.pos.x, o.pos.y};
    double best = INFINITY;
    for (size_t ri = 0; ri < rooms.size(); ++ri) {
      const Polygon& poly = rooms[ri];
      for (size_t e = 0; e < poly.size() && poly.size() >= 2; ++e) {
        const Vec2 a = poly[e], b = poly[(e + 1) % poly.size()];
        if (a == b) continue;
        const double d = point_segment_distance(c, a, b);
        if (d < best) {
          best = d;
          r.room = static_cast<int>(ri);
          r.edge = static_cast<int>(e);
        }
      }
    }
    r.distance = best;
    if (r.room >= 0 && best <= max_dist_cm) {
      const Polygon& poly = rooms[r.room];
      const Vec2 a = poly[r.edge], b = poly[(r.edge + 1) % poly.size()];
      const Vec2 q = project_onto_segment(c, a, b);
      r.opening.pos = {q.x, q.y, o.pos.z};
      const double wall = normalize_degrees(rad2deg(std::atan2(b.y - a.y, b.x - a.x)));
      const double flipped = normalize_degrees(wall + 180.0);
      r.opening.rotate =
          angle_distance(flipped, o.rotate) < angle_distance(wall, o.rotate) ? flipped : wall;
      r.attached = true;
    } else {
      r.room = -1;
      r.edge = -1;
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<int> assign_to_rooms(const std::vector<OrientedBox>& objects,
                                 const std::vector<Polygon>& rooms) {
  constexpr double kBoundaryEps = 1e-6;
  std::vector<int> out;
  out.reserve(objects.size());
  for (const OrientedBox& o : objects) {
    const Vec2 c = o.center();
    std::vector<int> inside, touching;
    for (size_t r = 0; r < rooms.size(); ++r) {
      if (rooms[r].size() < 3) continue;
      if (distance_to_boundary(c, rooms[r]) <= kBoundaryEps) {
        touching.push_back(static_cast<int>(r));
      } else if (point_in_polygon(c, rooms[r])) {
        inside.push_back(static_cast<int>(r));
      }
    }
    std::vector<int> candidates = inside;
    if (inside.size() != 1) candidates.insert(candidates.end(), touching.begin(), touching.end());
    std::sort(candidates.begin(), candidates.end());
    int pick = -1;
    if (candidates.size() == 1) {
      pick = candidates.front();
    } else if (!candidates.empty()) {
      const Quad fp = o.footprint();
      double best = -1.0;
      for (int r : candidates) {
        const double a = intersection_area_convex(rooms[r], fp);
        if (a > best) {
          best = a;
          pick = r;
        }
      }
    }
    out.push_back(pick);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Graph assembly
// ---------------------------------------------------------------------------

size_t SceneGraph::object_count() const {
  size_t n = unassigned.size();
  for (const RoomNode& r : rooms) n += r.objects.size();
  return n;
}

namespace {

ObjectNode make_object(std::string id, const OrientedBox& box, double confidence,
                       std::vector<std::string> flags, const AssetDatabase* db) {
  ObjectNode node;
  node.id = std::move(id);
  node.box = box;
  node.confidence = confidence;
  node.flags = std::move(flags);
  if (db) node.asset = retrieve_asset(box, *db);
  if (!node.asset) node.flags.push_back("no_match");
  return node;
}

}  // namespace

SceneGraph build_scene_graph(const std::vector<Detection>& detections,
                             const std::vector<RoomMask>& rooms,
                             const std::vector<Opening>& openings, const AssetDatabase& db,
                             const GraphOptions& options) {
  SceneGraph g;
  std::vector<Polygon> polys;
  std::set<std::string> ids;
  for (size_t i = 0; i < rooms.size(); ++i) {
    const RoomMask& m = rooms[i];
    if (m.exterior || m.outline) continue;
    RoomNode node;
    node.id = m.id.empty() ? "room_" + std::to_string(i) : m.id;
    while (!ids.insert(node.id).second) node.id += "_" + std::to_string(i);
    node.room_type = m.room_type;
    if (!m.name.empty()) node.name = m.name;
    else node.name = std::string(room_type_name(m.room_type));
    if (m.polygon.size() >= 3) {
      StraightenResult s = straighten_polygon(m.polygon, options.straighten);
      node.polygon = std::move(s.points);
      if (s.reverted) node.flags.push_back("straighten_reverted");
    } else {
      node.polygon = m.polygon;
      node.flags.push_back("degenerate");
    }
    polys.push_back(node.polygon);
    g.rooms.push_back(std::move(node));
  }

  const std::vector<AttachedOpening> attached = attach_openings(openings, polys, options.attach_dist_cm);
  for (size_t i = 0; i < attached.size(); ++i) {
    OpeningNode n;
    n.id = "opening_" + std::to_string(i);
    n.attached = attached[i].attached;
    n.opening = n.attached ? attached[i].opening : attached[i].original;
    if (n.attached) {
      n.room = g.rooms[attached[i].room].id;
      n.edge = attached[i].edge;
    } else {
      n.flags.push_back("unattached");
    }
    g.openings.push_back(std::move(n));
  }

  std::vector<OrientedBox> boxes;
  for (const Detection& d : detections) boxes.push_back(d.box);
  const std::vector<int> owner = assign_to_rooms(boxes, polys);
  for (size_t i = 0; i < detections.size(); ++i) {
    ObjectNode node = make_object("object_" + std::to_string(i), detections[i].box,
                                  detections[i].confidence, detections[i].flags, &db);
    if (owner[i] >= 0) g.rooms[owner[i]].objects.push_back(std::move(node));
    else g.unassigned.push_back(std::move(node));
  }
  return g;
}

SceneGraph build_scene_graph(const Scene& scene, const AssetDatabase& db,
                             const GraphOptions& options) {
  std::vector<Detection> dets;
  for (const OrientedBox& b : scene.furniture) {
    Detection d;
    d.box = b;
    d.confidence = 1.0;
    d.orientation_confidence = 1.0;
    dets.push_back(std::move(d));
  }
  return build_scene_graph(dets, segment_rooms(scene), scene.openings, db, options);
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

json box_fields(const OrientedBox& b) {
  return {{"category", b.category},
          {"pos", {b.pos.x, b.pos.y, b.pos.z}},
          {"length", b.length},
          {"width", b.width},
          {"height", b.height},
          {"rotate", b.rotate}};
}

json object_json(const ObjectNode& n) {
  json j = box_fields(n.box);
  j["id"] = n.id;
  j["confidence"] = n.confidence;
  j["flags"] = n.flags;
  if (n.asset) {
    j["asset"] = {{"id", n.asset->asset_id},
                  {"category", n.asset->category},
                  {"length", n.asset->length},
                  {"width", n.asset->width},
                  {"height", n.asset->height},
                  {"source", n.asset->source}};
  } else {
    j["asset"] = nullptr;
  }
  j["children"] = json::array();
  for (const ObjectNode& c : n.children) j["children"].push_back(object_json(c));
  return j;
}

ObjectNode object_from(const json& j, const std::string& path) {
  ObjectNode n;
  n.id = string_at(j, "id", path);
  n.box.category = string_at(j, "category", path);
  n.box.pos = vec3_at(j, "pos", path);
  n.box.length = number_at(j, "length", path);
  n.box.width = number_at(j, "width", path);
  n.box.height = number_at(j, "height", path);
  n.box.rotate = number_at(j, "rotate", path);
  n.confidence = number_at(j, "confidence", path);
  n.flags = strings_at(j, "flags", path);
  const json& a = member(j, "asset", path);
  if (!a.is_null()) {
    const std::string ap = path + "/asset";
    AssetRef r;
    r.asset_id = string_at(a, "id", ap);
    r.category = string_at(a, "category", ap);
    r.length = number_at(a, "length", ap);
    r.width = number_at(a, "width", ap);
    r.height = number_at(a, "height", ap);
    r.source = string_at(a, "source", ap);
    n.asset = std::move(r);
  }
  const json& ch = array_at(j, "children", path);
  for (size_t i = 0; i < ch.size(); ++i) {
    n.children.push_back(object_from(ch[i], path + "/children/" + std::to_string(i)));
  }
  return n;
}

}  // namespace

std::string graph_to_json(const SceneGraph& graph, int indent) {
  json house = json::object();
  house["rooms"] = json::array();
  for (const RoomNode& r : graph.rooms) {
    json j;
    j["id"] = r.id;
    j["name"] = r.name;
    j["room_type"] = r.room_type;
    j["polygon"] = json::array();
    for (const Vec2& p : r.polygon) j["polygon"].push_back({p.x, p.y});
    j["materials"] = json::object();
    for (const auto& [k, v] : r.materials) j["materials"][k] = v;
    j["flags"] = r.flags;
    j["objects"] = json::array();
    for (const ObjectNode& o : r.objects) j["objects"].push_back(object_json(o));
    house["rooms"].push_back(std::move(j));
  }
  house["unassigned"] = json::array();
  for (const ObjectNode& o : graph.unassigned) house["unassigned"].push_back(object_json(o));
  if (!graph.openings.empty()) {
    house["openings"] = json::array();
    for (const OpeningNode& n : graph.openings) {
      const Opening& o = n.opening;
      house["openings"].push_back({{"id", n.id},
                                   {"kind", o.kind == OpeningKind::kDoor ? "door" : "window"},
                                   {"pos", {o.pos.x, o.pos.y, o.pos.z}},
                                   {"length", o.length},
                                   {"width", o.width},
                                   {"height", o.height},
                                   {"rotate", o.rotate},
                                   {"attached", n.attached},
                                   {"room", n.room},
                                   {"edge", n.edge},
                                   {"flags", n.flags}});
    }
  }
  json doc;
  doc["house"] = std::move(house);
  return doc.dump(indent);
}

SceneGraph graph_from_json(std::string_view text) {
  const json doc = parse_text(text);
  const json& house = member(doc, "house", "");
  SceneGraph g;
  const json& rooms = array_at(house, "rooms", "/house");
  for (size_t i = 0; i < rooms.size(); ++i) {
    const std::string path = "/house/rooms/" + std::to_string(i);
    const json& j = rooms[i];
    RoomNode r;
    r.id = string_at(j, "id", path);
    r.name = string_at(j, "name", path);
    const json& t = member(j, "room_type", path);
    if (!t.is_number_integer()) fail(ErrorKind::kType, "expected an integer at " + path + "/room_type");
    r.room_type = t.get<int>();
    const json& poly = array_at(j, "polygon", path);
    for (size_t k = 0; k < poly.size(); ++k) {
      const json& p = poly[k];
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
        fail(ErrorKind::kType, "expected [x, y] at " + path + "/polygon/" + std::to_string(k));
      }
      r.polygon.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    const json& mats = member(j, "materials", path);
    if (!mats.is_object()) fail(ErrorKind::kType, "expected an object at " + path + "/materials");
    for (auto it = mats.begin(); it != mats.end(); ++it) {
      if (!it->is_string()) fail(ErrorKind::kType, "expected a string at " + path + "/materials/" + it.key());
      r.materials[it.key()] = it->get<std::string>();
    }
    r.flags = strings_at(j, "flags", path);
    const json& objs = array_at(j, "objects", path);
    for (size_t k = 0; k < objs.size(); ++k) {
      r.objects.push_back(object_from(objs[k], path + "/objects/" + std::to_string(k)));
    }
    g.rooms.push_back(std::move(r));
  }
  const json& un = array_at(house, "unassigned", "/house");
  for (size_t i = 0; i < un.size(); ++i) {
    g.unassigned.push_back(object_from(un[i], "/house/unassigned/" + std::to_string(i)));
  }
  if (house.contains("openings")) {
    const json& ops = array_at(house, "openings", "/house");
    for (size_t i = 0; i < ops.size(); ++i) {
      const std::string path = "/house/openings/" + std::to_string(i);
      const json& j = ops[i];
      OpeningNode n;
      n.id = string_at(j, "id", path);
      const std::string kind = string_at(j, "kind", path);
      if (kind != "door" && kind != "window") {
        fail(ErrorKind::kValidation, "expected \"door\" or \"window\" at " + path + "/kind");
      }
      n.opening.kind = kind == "door" ? OpeningKind::kDoor : OpeningKind::kWindow;
      n.opening.pos = vec3_at(j, "pos", path);
      n.opening.length = number_at(j, "length", path);
      n.opening.width = number_at(j, "width", path);
      n.opening.height = number_at(j, "height", path);
      n.opening.rotate = number_at(j, "rotate", path);
      const json& att = member(j, "attached", path);
      if (!att.is_boolean()) fail(ErrorKind::kType, "expected a boolean at " + path + "/attached");
      n.attached = att.get<bool>();
      n.room = string_at(j, "room", path);
      const json& e = member(j, "edge", path);
      if (!e.is_number_integer()) fail(ErrorKind::kType, "expected an integer at " + path + "/edge");
      n.edge = e.get<int>();
      n.flags = strings_at(j, "flags", path);
      g.openings.push_back(std::move(n));
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// SVG
// ---------------------------------------------------------------------------

namespace {

std::string fmt2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  // "-0.00" and "0.00" must print the same for byte-stable output.
  if (std::string_view(buf) == "-0.00") return "0.00";
  return buf;
}

std::string points_attr(std::span<const Vec2> pts) {
  std::string s;
  for (size_t i = 0; i < pts.size(); ++i) {
    if (i) s += ' ';
    s += fmt2(pts[i].x) + "," + fmt2(pts[i].y);
  }
  return s;
}

std::string escape_xml(std::string_view in) {
  std::string out;
  for (char c : in) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string gray_hex(double g) {
  const int v = static_cast<int>(std::lround(std::clamp(g, 0.0, 1.0) * 255.0));
  return to_hex(Rgb8{static_cast<uint8_t>(v), static_cast<uint8_t>(v), static_cast<uint8_t>(v)});
}

void emit_object(std::ostringstream& os, const ObjectNode& n, const OrientedBox& world,
                 const Palette& palette, const char* cls) {
  const PaletteEntry* e = palette.find(world.category);
  const std::string fill = e ? to_hex(e->color) : "808080";
  const double alpha = e ? e->alpha : 0.3;
  const Quad q = world.footprint();
  os << "  <polygon class=\"" << cls << "\" data-id=\"" << escape_xml(n.id) << "\" points=\""
     << points_attr(q) << "\" fill=\"#" << fill << "\" fill-opacity=\"" << fmt2(alpha)
     << "\" stroke=\"#" << fill << "\" stroke-width=\"1.00\"/>\n";
  os << "  <text x=\"" << fmt2(world.pos.x) << "\" y=\"" << fmt2(world.pos.y)
     << "\" font-size=\"12.00\" text-anchor=\"middle\">" << escape_xml(world.category) << "</text>\n";
  for (const ObjectNode& c : n.children) {
    emit_object(os, c, from_parent_frame(c.box, world), palette, "child");
  }
}

}  // namespace

std::string export_svg(const SceneGraph& graph, const Palette& palette, double wall_thickness_cm) {
  Aabb b = Aabb::empty_box();
  for (const RoomNode& r : graph.rooms) {
    for (const Vec2& p : r.polygon) b.expand(p);
  }
  for (const OpeningNode& o : graph.openings) {
    for (const Vec2& p : o.opening.footprint()) b.expand(p);
  }
  auto add_objects = [&](const std::vector<ObjectNode>& list) {
    for (const ObjectNode& n : list) b.expand(n.box.bounds());
  };
  for (const RoomNode& r : graph.rooms) add_objects(r.objects);
  add_objects(graph.unassigned);

  double x0 = 0, y0 = 0, w = 100, h = 100;
  if (!b.empty()) {
    const double pad = wall_thickness_cm + 20.0;
    x0 = b.min_x - pad;
    y0 = b.min_y - pad;
    w = b.width() + 2 * pad;
    h = b.height() + 2 * pad;
  }
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"" << fmt2(x0) << ' '
     << fmt2(y0) << ' ' << fmt2(w) << ' ' << fmt2(h) << "\" width=\"" << fmt2(w) << "\" height=\""
     << fmt2(h) << "\">\n";
  os << "  <rect class=\"background\" x=\"" << fmt2(x0) << "\" y=\"" << fmt2(y0) << "\" width=\""
     << fmt2(w) << "\" height=\"" << fmt2(h) << "\" fill=\"#" << to_hex(palette.background())
     << "\"/>\n";
  for (const RoomNode& r : graph.rooms) {
    const double gray = r.room_type >= 1 && r.room_type <= kRoomTypeCount ? room_type_gray(r.room_type) : 0.9;
    os << "  <polygon class=\"room\" data-id=\"" << escape_xml(r.id) << "\" points=\""
       << points_attr(r.polygon) << "\" fill=\"#" << gray_hex(gray) << "\"/>\n";
  }
  const PaletteEntry* wall = palette.find_role(Role::kWall);
  const std::string wall_color = wall ? to_hex(wall->color) : "000000";
  for (const RoomNode& r : graph.rooms) {
    os << "  <polygon class=\"wall\" points=\"" << points_attr(r.polygon)
       << "\" fill=\"none\" stroke=\"#" << wall_color << "\" stroke-width=\""
       << fmt2(wall_thickness_cm) << "\" stroke-linejoin=\"miter\"/>\n";
  }
  for (const OpeningNode& o : graph.openings) {
    const bool door = o.opening.kind == OpeningKind::kDoor;
    const PaletteEntry* e = palette.find_role(door ? Role::kDoor : Role::kWindow);
    const std::string fill = e ? to_hex(e->color) : (door ? "ff0000" : "0000ff");
    os << "  <polygon class=\"" << (door ? "door" : "window") << "\" data-id=\""
       << escape_xml(o.id) << "\" points=\"" << points_attr(o.opening.footprint()) << "\" fill=\"#"
       << fill << "\"/>\n";
  }
  for (const RoomNode& r : graph.rooms) {
    for (const ObjectNode& n : r.objects) emit_object(os, n, n.box, palette, "object");
  }
  for (const ObjectNode& n : graph.unassigned) emit_object(os, n, n.box, palette, "object");
  os << "</svg>\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Fine level
// ---------------------------------------------------------------------------

OrientedBox to_parent_frame(const OrientedBox& child, const OrientedBox& parent) {
  OrientedBox out = child;
  const Vec2 local = rotate(child.center() - parent.center(), -parent.rotate);
  out.pos = {local.x, local.y, child.pos.z};
  out.rotate = normalize_degrees(child.rotate - parent.rotate);
  return out;
}

OrientedBox from_parent_frame(const OrientedBox& child, const OrientedBox& parent) {
  OrientedBox out = child;
  const Vec2 world = parent.center() + rotate(child.center(), parent.rotate);
  out.pos = {world.x, world.y, child.pos.z};
  out.rotate = normalize_degrees(child.rotate + parent.rotate);
  return out;
}

FineResult place_children(const OrientedBox& parent, const std::vector<Detection>& detections,
                          const AssetDatabase* db) {
  FineResult res;
  const Quad pq = parent.footprint();
  int k = 0;
  for (const Detection& d : detections) {
    // The parent outline decodes as its own category; it is not a child.
    if (d.box.category == parent.category || is_fine_parent(d.box.category)) continue;
    OrientedBox box = d.box;
    std::vector<std::string> flags = d.flags;
    const Quad cq = box.footprint();
    const double area = box.footprint_area();
    const double inter = intersection_area_convex(cq, pq);
    bool discard = false;
    if (inter < area * (1.0 - 1e-9)) {
      double overhang = 0.0;
      for (const Vec2& c : cq) {
        if (!point_in_polygon(c, pq)) overhang = std::max(overhang, distance_to_boundary(c, pq));
      }
      if (overhang <= kOverhangTolerance * box.width) {
        flags.push_back("overhang");
      } else if (inter > 1e-9 * area) {
        // Shrink to the part over the parent, measured along the child's axes.
        const Polygon part = clip_convex(cq, pq);
        const Vec2 u = rotate({1, 0}, box.rotate), v = rotate({0, 1}, box.rotate);
        double ulo = INFINITY, uhi = -INFINITY, vlo = INFINITY, vhi = -INFINITY;
        for (const Vec2& p : part) {
          const Vec2 r = p - box.center();
          ulo = std::min(ulo, dot(r, u));
          uhi = std::max(uhi, dot(r, u));
          vlo = std::min(vlo, dot(r, v));
          vhi = std::max(vhi, dot(r, v));
        }
        const Vec2 c = box.center() + u * (0.5 * (ulo + uhi)) + v * (0.5 * (vlo + vhi));
        box.pos.x = c.x;
        box.pos.y = c.y;
        box.length = uhi - ulo;
        box.width = vhi - vlo;
        flags.push_back("clipped");
      } else {
        discard = true;
        flags.push_back("outside_parent");
      }
    }
    box.pos.z = parent.height;
    ObjectNode node = make_object("child_" + std::to_string(k++), to_parent_frame(box, parent),
                                  d.confidence, std::move(flags), db);
    (discard ? res.discarded : res.children).push_back(std::move(node));
  }
  return res;
}

FineResult fine_grained_generate(const ObjectNode& parent, const Denoiser& denoiser,
                                 const Palette& palette, const NoiseSchedule& schedule, Rng& rng,
                                 const Canvas& canvas, const AssetDatabase* db,
                                 const SampleOptions& sample_options) {
  if (!is_fine_parent(parent.box.category)) {
    fail(ErrorKind::kArgument, "category '" + parent.box.category + "' does not take children");
  }
  const LayoutImage cond_img = rasterize_parent_boundary(parent.box, palette, canvas);
  const Tensor x = sample(denoiser, image_to_tensor(cond_img), schedule, rng, sample_options);
  const LayoutImage out = tensor_to_image(x, cond_img.transform);
  FineResult res = place_children(parent.box, detect_objects(out, palette, cond_img.transform), db);
  for (auto* list : {&res.children, &res.discarded}) {
    for (ObjectNode& n : *list) n.id = parent.id + "/" + n.id;
  }
  return res;
}

}  // namespace chord
