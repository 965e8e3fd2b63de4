// Copyright 2026 The chord-layout Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chord/diffusion.hpp"
#include "chord/perception.hpp"
#include "chord/raster.hpp"
#include "chord/scene.hpp"

namespace chord {

// ---------------------------------------------------------------------------
// Assets
// ---------------------------------------------------------------------------

struct AssetRef {
  std::string asset_id;
  std::string category;
  double length = 0.0;
  double width = 0.0;
  double height = 0.0;
  std::string source;  // database id

  friend bool operator==(const AssetRef&, const AssetRef&) = default;
};

class AssetDatabase {
 public:
  AssetDatabase() = default;
  /// Throws kValidation for duplicate ids or non-positive dimensions.
  AssetDatabase(std::string id, std::vector<AssetRef> entries);

  /// JSON list of {id, category, length, width, height}, or an object
  /// {"id": ..., "assets": [...]}.
  static AssetDatabase from_json(std::string_view text, std::string id = "db");
  static AssetDatabase load(const std::string& path);
  std::string to_json() const;

  const std::string& id() const { return id_; }
  const std::vector<AssetRef>& entries() const { return entries_; }
  /// Indices into entries() for one category, in id order.
  const std::vector<size_t>& by_category(std::string_view category) const;

 private:
  std::string id_ = "db";
  std::vector<AssetRef> entries_;
  std::map<std::string, std::vector<size_t>, std::less<>> index_;
};

/// Category-matched asset minimizing (dl^2 + dw^2); ties go to the smallest
/// asset_id. nullopt when the category has no entry.
std::optional<AssetRef> retrieve_asset(const OrientedBox& o, const AssetDatabase& db);

// ---------------------------------------------------------------------------
// Room geometry
// ---------------------------------------------------------------------------

struct StraightenOptions {
  double angle_tol_deg = 5.0;
  double snap_tol_cm = 6.0;
};

struct StraightenResult {
  Polygon points;
  /// Set when straightening would break the loop; `points` is then the input.
  bool reverted = false;
};

/// Snaps near-axis edges axis-parallel, merges coordinates and vertices
/// closer than snap_tol and drops collinear vertices. Idempotent. Throws
/// kArgument for fewer than 3 vertices.
StraightenResult straighten_polygon(const Polygon& points, const StraightenOptions& options = {});

struct AttachedOpening {
  Opening opening;           // projected onto the wall, rotation along it
  Opening original;
  bool attached = false;
  int room = -1;             // index into the room list
  int edge = -1;             // wall segment i runs from vertex i to i + 1
  double distance = 0.0;     // center to wall before projection
};

/// Projects every opening onto the nearest room edge within max_dist_cm.
std::vector<AttachedOpening> attach_openings(const std::vector<Opening>& openings,
                                             const std::vector<Polygon>& rooms,
                                             double max_dist_cm = 30.0);

/// Room index per object, -1 when no room contains the footprint centroid.
/// Centroids on a boundary go to the room with the larger footprint overlap.
std::vector<int> assign_to_rooms(const std::vector<OrientedBox>& objects,
                                 const std::vector<Polygon>& rooms);

// ---------------------------------------------------------------------------
// Graph
// ---------------------------------------------------------------------------

struct ObjectNode {
  std::string id;
  OrientedBox box;  // world cm; children are in their parent's frame
  std::optional<AssetRef> asset;
  double confidence = 1.0;
  std::vector<std::string> flags;  // "no_match", "split", "clipped", ...
  std::vector<ObjectNode> children;

  friend bool operator==(const ObjectNode&, const ObjectNode&) = default;
};

struct OpeningNode {
  std::string id;
  Opening opening;
  bool attached = false;
  std::string room;  // room node id, empty when unattached
  int edge = -1;
  std::vector<std::string> flags;

  friend bool operator==(const OpeningNode&, const OpeningNode&) = default;
};

struct RoomNode {
  std::string id;
  std::string name;
  int room_type = -1;
  Polygon polygon;
  std::map<std::string, std::string> materials;
  std::vector<std::string> flags;
  std::vector<ObjectNode> objects;

  friend bool operator==(const RoomNode&, const RoomNode&) = default;
};

struct SceneGraph {
  std::vector<RoomNode> rooms;
  std::vector<ObjectNode> unassigned;
  std::vector<OpeningNode> openings;

  size_t object_count() const;
  friend bool operator==(const SceneGraph&, const SceneGraph&) = default;
};

struct GraphOptions {
  StraightenOptions straighten;
  double attach_dist_cm = 30.0;
};

/// Straightens rooms, attaches openings, assigns objects and retrieves
/// assets. Exterior regions and house outlines do not become room nodes.
SceneGraph build_scene_graph(const std::vector<Detection>& detections,
                             const std::vector<RoomMask>& rooms,
                             const std::vector<Opening>& openings, const AssetDatabase& db,
                             const GraphOptions& options = {});
/// Uses the scene's furniture as detections and its rooms as masks.
SceneGraph build_scene_graph(const Scene& scene, const AssetDatabase& db,
                             const GraphOptions& options = {});

std::string graph_to_json(const SceneGraph& graph, int indent = -1);
/// Throws kParse / kSchema / kType like the scene loader.
SceneGraph graph_from_json(std::string_view text);

/// Top-down SVG of rooms, walls, openings and objects.
std::string export_svg(const SceneGraph& graph, const Palette& palette,
                       double wall_thickness_cm = 24.0);

// ---------------------------------------------------------------------------
// Fine level
// ---------------------------------------------------------------------------

/// Share of a child's depth that may hang over the parent edge.
constexpr double kOverhangTolerance = 0.15;

struct FineResult {
  std::vector<ObjectNode> children;   // parent frame, z = parent height
  std::vector<ObjectNode> discarded;  // outside the parent, flagged
};

/// World box -> frame of `parent` (origin at its center, x along its length).
OrientedBox to_parent_frame(const OrientedBox& child, const OrientedBox& parent);
OrientedBox from_parent_frame(const OrientedBox& child, const OrientedBox& parent);

/// Applies the overhang rule to world-space child boxes.
FineResult place_children(const OrientedBox& parent, const std::vector<Detection>& detections,
                          const AssetDatabase* db = nullptr);

/// Samples a tabletop layout for `parent` and decodes it into child nodes.
/// Throws kArgument for a category that does not take children.
FineResult fine_grained_generate(const ObjectNode& parent, const Denoiser& denoiser,
                                 const Palette& palette, const NoiseSchedule& schedule, Rng& rng,
                                 const Canvas& canvas, const AssetDatabase* db = nullptr,
                                 const SampleOptions& sample_options = {});

}  // namespace chord
