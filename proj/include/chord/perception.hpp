// Copyright 2026 The chord-layout Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "chord/raster.hpp"
#include "chord/scene.hpp"

namespace chord {

/// Acceptance radius (Euclidean RGB) for assigning a pixel to a palette color.
constexpr double kColorTau = 0.06;
/// Composited palette colors closer than this are rejected as ambiguous.
constexpr double kMinColorSeparation = 0.01;

/// Per-pixel label: -1 for background, -2 for unmatched colors, otherwise
/// 2 * palette index + part where part is 0 for the body color and 1 for the
/// front-marker color.
struct LabelMap {
  int width = 0;
  int height = 0;
  std::vector<int32_t> labels;

  static constexpr int32_t kBackground = -1;
  static constexpr int32_t kUnknown = -2;  // no palette color within tau
  static int32_t encode(int entry, bool marker) { return 2 * entry + (marker ? 1 : 0); }
  static int entry_of(int32_t label) { return label / 2; }
  static bool is_marker(int32_t label) { return (label & 1) != 0; }

  int32_t at(int x, int y) const { return labels[static_cast<size_t>(y) * width + x]; }
};

/// Nearest-color lookup over every composited palette color (background,
/// body, marker). Construction throws kPalette when two composited colors
/// are closer than `min_separation`.
class PixelClassifier {
 public:
  explicit PixelClassifier(const Palette& palette, double tau = kColorTau,
                           double min_separation = kMinColorSeparation);

  int32_t classify(const Color& c) const;
  /// Distance from `c` to the composited color behind `label`.
  double distance(const Color& c, int32_t label) const;
  const Palette& palette() const { return palette_; }

 private:
  struct Ref {
    Color color;
    int32_t label;
  };
  Palette palette_;
  std::vector<Ref> refs_;
  double tau_;
};

LabelMap classify_pixels(const LayoutImage& image, const Palette& palette, double tau = kColorTau);

struct Detection {
  OrientedBox box;                 // world centimeters
  double confidence = 0.0;         // share of mask pixels on the exact color
  double orientation_confidence = 0.0;
  std::vector<int32_t> pixels;     // y * width + x
  std::vector<std::string> flags;  // "split", "no_marker", ...

  // Pixel-space fit, kept for diagnostics.
  Vec2 center_px;
  double length_px = 0.0;
  double width_px = 0.0;
};

struct DetectOptions {
  double tau = kColorTau;
  int min_area_px = 9;
  double snap_window_deg = 10.0;
  /// Components whose pixel count over fitted-rectangle area falls below
  /// this are split by a distance-transform watershed.
  double split_fill_ratio = 0.75;
  bool split_overlaps = true;
  /// Strict color match used for `confidence`.
  double confidence_tol = 0.02;
};

/// Connected components (8-connectivity) per category, each fitted with a
/// minimum-area rotated rectangle. Orientation comes from the centroid of the
/// marker pixels. Output order is the raster order of each component's first
/// pixel.
std::vector<Detection> detect_objects(const LayoutImage& image, const Palette& palette,
                                      const WorldTransform& transform,
                                      const DetectOptions& options = {});
inline std::vector<Detection> detect_objects(const LayoutImage& image, const Palette& palette,
                                             const DetectOptions& options = {}) {
  return detect_objects(image, palette, image.transform, options);
}

/// Furniture-shaped JSON array plus `confidence` and `orientation_confidence`.
std::string detections_to_json(const std::vector<Detection>& detections);
std::vector<Detection> detections_from_json(std::string_view text);

struct RoomMask {
  std::string id;
  std::string name;
  int room_type = -1;     // -1: unknown
  bool exterior = false;  // region reaches the image border
  bool outline = false;   // the house outline record of a scene
  std::vector<int32_t> pixels;
  Polygon polygon;        // world cm
};

/// Image path: flood fill (4-connectivity) of everything that is not wall,
/// door or window; regions touching the border are marked exterior. Room
/// types come from gray fills when present.
std::vector<RoomMask> segment_rooms(const LayoutImage& floorplan, const Palette& palette);
/// Scene path: polygons taken from the wall loops.
std::vector<RoomMask> segment_rooms(const Scene& scene);

}  // namespace chord
