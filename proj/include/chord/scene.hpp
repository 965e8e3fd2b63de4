// Copyright 2026 The chord-layout Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chord/geometry.hpp"

namespace chord {

// ---------------------------------------------------------------------------
// Categories
// ---------------------------------------------------------------------------

enum class Level { kHouse, kFine };

/// What a category stands for when drawn. Floor-plan items (wall, door,
/// window) are opaque; objects are alpha-blended.
enum class Role { kObject, kWall, kDoor, kWindow };

struct Rgb8 {
  uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(Rgb8, Rgb8) = default;
};

/// Parses "RRGGBB" (optionally prefixed by '#').
std::optional<Rgb8> parse_hex_color(std::string_view hex);
std::string to_hex(Rgb8 c);

struct Category {
  std::string name;
  Level level = Level::kHouse;
  Role role = Role::kObject;
  Rgb8 color;
};

/// 26 household categories plus wall, door and window.
const std::vector<Category>& house_categories();
/// Parent surfaces and the items that can be placed on them.
const std::vector<Category>& fine_categories();
/// Parent categories that support fine-grained generation.
bool is_fine_parent(std::string_view category);

// ---------------------------------------------------------------------------
// Scene records (centimeters, degrees counterclockwise)
// ---------------------------------------------------------------------------

struct Room {
  std::string id;
  std::string name;
  int type = 0;
  Polygon wall_points;

  /// The house outline record ("out_room"), not an inner room.
  bool is_outline() const { return name == "out_room"; }
  friend bool operator==(const Room&, const Room&) = default;
};

/// roomType codes: 0 is the house outline, 1..6 the named room kinds.
constexpr int kRoomTypeCount = 6;
/// "living", "bedroom", "kitchen", "bathroom", "balcony", "study";
/// "out_room" for 0 and "unknown" otherwise.
std::string_view room_type_name(int type);

enum class OpeningKind { kDoor, kWindow };

struct Opening {
  OpeningKind kind = OpeningKind::kDoor;
  Vec3 pos;  // x, y: box center; z: height above the floor
  double length = 0.0;
  double width = 0.0;
  double height = 0.0;
  double rotate = 0.0;

  Quad footprint() const;
  friend bool operator==(const Opening&, const Opening&) = default;
};

/// Category-tagged box rotated about the vertical axis through `pos`.
/// `length` runs along the local x axis, `width` along local y; local +y is
/// the front of the object.
struct OrientedBox {
  std::string category;
  Vec3 pos;
  double length = 0.0;
  double width = 0.0;
  double height = 0.0;
  double rotate = 0.0;

  Vec2 center() const { return {pos.x, pos.y}; }
  /// Corners in counterclockwise order (y up).
  Quad footprint() const;
  double footprint_area() const { return length * width; }
  Aabb bounds() const;
  friend bool operator==(const OrientedBox&, const OrientedBox&) = default;
};

struct Scene {
  std::vector<Room> rooms;
  std::vector<Opening> openings;
  std::vector<OrientedBox> furniture;

  friend bool operator==(const Scene&, const Scene&) = default;
};

/// Axis-aligned bounds of rooms, openings and furniture footprints.
Aabb scene_bounds(const Scene& scene);

/// Loads the `rooms` / `windowsDoors` / `furniture` JSON layout. Throws
/// chord::Error (kParse with byte offset, kSchema naming the key, kType with
/// the JSON pointer of the offending value).
Scene parse_scene(std::string_view json_text);
Scene load_scene(const std::string& path);
std::string serialize_scene(const Scene& scene, int indent = 2);

/// Structural equality with a per-float tolerance.
bool scenes_equal(const Scene& a, const Scene& b, double tol = 1e-9);

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

enum class ViolationCode {
  kDegenerateRoom,   // < 3 points, zero area or self-intersecting loop
  kBadDimension,     // non-positive length/width/height
  kNonFinite,        // NaN/inf coordinate or angle
  kOutsideRooms,     // furniture centroid outside every room polygon
  kEmptyRoom,        // inner room without any furniture centroid
  kUnknownCategory,  // furniture category not in the known set
};

const char* violation_code_name(ViolationCode code);

struct Violation {
  ViolationCode code;
  std::string subject;  // "rooms[0]", "furniture[3]", ...
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  size_t count(ViolationCode code) const;
  std::string to_json() const;
};

/// Checks a scene against the household category table.
ValidationReport validate_scene(const Scene& scene);
ValidationReport validate_scene(const Scene& scene,
                                const std::vector<std::string>& known_categories);

// ---------------------------------------------------------------------------
// Toy scenes
// ---------------------------------------------------------------------------

enum class CollisionMode { kForbid, kForce };

struct ToyConfig {
  int rooms_min = 1;
  int rooms_max = 3;
  int furniture_min = 2;  // per room
  int furniture_max = 4;
  double house_min_cm = 500.0;
  double house_max_cm = 900.0;
  double min_room_cm = 250.0;
  double wall_thickness_cm = 24.0;
  double min_gap_cm = 20.0;      // clearance between objects and walls
  double size_jitter = 0.15;     // +/- relative jitter on nominal sizes
  bool openings = true;
  bool outline = true;           // emit an "out_room" house outline record
  CollisionMode collision_mode = CollisionMode::kForbid;
  double force_min_iou = 0.2;
  int max_retries = 400;
  double min_dim_cm = 40.0;      // lower bound on sampled length/width
  std::vector<std::string> categories;  // empty: all household objects

  /// key=value lines; '#' comments. Unknown keys are rejected.
  static ToyConfig parse(std::string_view text);
  std::string to_text() const;
};

/// Deterministic synthetic scene: rectangular rooms from guillotine splits of
/// the house rectangle, doors on shared walls, windows on exterior walls and
/// axis-aligned furniture. kForbid keeps every footprint pair disjoint with
/// `min_gap_cm` clearance; kForce adds one object overlapping an existing one
/// with footprint IoU >= `force_min_iou`.
Scene generate_toy_scene(uint64_t seed, const ToyConfig& config);

/// Nominal (length, width, height) in cm for a household or tabletop
/// category; a generic size for anything else.
Vec3 nominal_size(std::string_view category);

}  // namespace chord
