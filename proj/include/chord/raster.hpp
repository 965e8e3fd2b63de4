// Copyright 2026 The chord-layout Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "chord/geometry.hpp"
#include "chord/scene.hpp"

namespace chord {

using Color = std::array<double, 3>;

inline Color to_color(Rgb8 c) { return {c.r / 255.0, c.g / 255.0, c.b / 255.0}; }

// ---------------------------------------------------------------------------
// Palette
// ---------------------------------------------------------------------------

struct PaletteEntry {
  std::string name;
  Role role = Role::kObject;
  Rgb8 color;
  double alpha = 0.3;
  int layer = 0;  // drawing rank among objects; lower first
};

/// Category -> color/alpha/layer for one level of the hierarchy.
class Palette {
 public:
  static constexpr double kObjectAlpha = 0.3;
  static constexpr double kMarkerAlpha = 0.6;

  Palette() = default;
  Palette(Level level, std::vector<PaletteEntry> entries, Rgb8 background = {255, 255, 255},
          double marker_alpha = kMarkerAlpha);

  /// Household palette: objects at alpha 0.3, wall/door/window opaque.
  static Palette house_default();
  /// Fine-grained palette: parents and tabletop items at alpha 0.3.
  static Palette fine_default();
  static Palette from_json(std::string_view text);
  static Palette load(const std::string& path);
  std::string to_json() const;

  Level level() const { return level_; }
  Rgb8 background() const { return background_; }
  double marker_alpha() const { return marker_alpha_; }
  const std::vector<PaletteEntry>& entries() const { return entries_; }

  const PaletteEntry* find(std::string_view name) const;
  const PaletteEntry* find_role(Role role) const;
  /// Index into entries(), or -1.
  int index_of(std::string_view name) const;

  /// Composited colors over the background.
  Color body_color(const PaletteEntry& e) const;
  Color marker_color(const PaletteEntry& e) const;

  /// FNV-1a of the canonical JSON form; stored in checkpoints.
  uint64_t hash() const;

 private:
  Level level_ = Level::kHouse;
  std::vector<PaletteEntry> entries_;
  Rgb8 background_{255, 255, 255};
  double marker_alpha_ = kMarkerAlpha;
};

// ---------------------------------------------------------------------------
// Images
// ---------------------------------------------------------------------------

/// Isotropic scale plus translation: pixel = world * scale + offset.
/// Pixel (i, j) covers [i, i+1) x [j, j+1); its center is (i+0.5, j+0.5).
struct WorldTransform {
  double scale = 1.0;
  double offset_x = 0.0;
  double offset_y = 0.0;

  Vec2 to_pixel(Vec2 w) const { return {w.x * scale + offset_x, w.y * scale + offset_y}; }
  Vec2 to_world(Vec2 p) const { return {(p.x - offset_x) / scale, (p.y - offset_y) / scale}; }
  friend bool operator==(const WorldTransform&, const WorldTransform&) = default;
};

struct LayoutImage {
  int width = 0;
  int height = 0;
  std::vector<float> pixels;  // row-major interleaved RGB in [0, 1]
  WorldTransform transform;
  std::vector<std::string> warnings;

  LayoutImage() = default;
  LayoutImage(int w, int h, Color fill = {1, 1, 1});

  size_t index(int x, int y) const { return (static_cast<size_t>(y) * width + x) * 3; }
  Color get(int x, int y) const {
    const size_t i = index(x, y);
    return {pixels[i], pixels[i + 1], pixels[i + 2]};
  }
  void set(int x, int y, const Color& c);
  /// dst = alpha * c + (1 - alpha) * dst
  void blend(int x, int y, const Color& c, double alpha);
};

struct Canvas {
  int width = 256;
  int height = 256;
  int margin = 8;
  double wall_thickness_cm = 24.0;
  /// Supersampled coverage for display renders; off for decodable images.
  bool antialias = false;
  /// Paint inner rooms with a gray level per roomType (open-plan conditioning).
  bool room_type_fill = false;
};

/// Gray value used for a roomType code when `room_type_fill` is on.
double room_type_gray(int room_type);
/// Inverse of room_type_gray; -1 when `gray` is not a room code.
int room_type_from_gray(double gray);

/// Uniform scale that fits the scene bounds into the canvas minus margin,
/// centered. Throws kTransform for a degenerate bounding box.
WorldTransform fit_transform(const Scene& scene, const Canvas& canvas);

/// Objects (alpha-over, by layer then decreasing footprint area, each with a
/// front marker strip), then walls, then doors/windows.
LayoutImage rasterize_layout(const Scene& scene, const Palette& palette, const Canvas& canvas);
/// Walls, doors and windows only, with the transform rasterize_layout uses.
LayoutImage rasterize_floorplan(const Scene& scene, const Palette& palette, const Canvas& canvas);

/// Side of the fixed world window used at the fine level.
constexpr double kFineWindowCm = 200.0;

/// Fixed 200 cm window centered on the parent; the parent footprint is drawn
/// as an outline in its category color.
WorldTransform fine_transform(const OrientedBox& parent, const Canvas& canvas);
LayoutImage rasterize_parent_boundary(const OrientedBox& parent, const Palette& palette,
                                      const Canvas& canvas);
/// Children in world coordinates drawn under the parent outline.
LayoutImage rasterize_fine_layout(const OrientedBox& parent,
                                  const std::vector<OrientedBox>& children,
                                  const Palette& palette, const Canvas& canvas);

/// Front strip depth in pixels for a footprint `depth_px` deep.
double marker_depth_px(double depth_px);

Scene strip_furniture(Scene scene);

}  // namespace chord
