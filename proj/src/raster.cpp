// Copyright 2026 The chord-layout Authors
// SPDX-License-Identifier: Apache-2.0

#include "chord/raster.hpp"

#include <algorithm>
#include <numeric>

#include "chord/error.hpp"

namespace chord {

LayoutImage::LayoutImage(int w, int h, Color fill) : width(w), height(h) {
  if (w <= 0 || h <= 0) fail(ErrorKind::kArgument, "image dimensions must be positive");
  pixels.resize(static_cast<size_t>(w) * h * 3);
  for (size_t i = 0; i < pixels.size(); i += 3) {
    pixels[i] = static_cast<float>(fill[0]);
    pixels[i + 1] = static_cast<float>(fill[1]);
    pixels[i + 2] = static_cast<float>(fill[2]);
  }
}

void LayoutImage::set(int x, int y, const Color& c) {
  const size_t i = index(x, y);
  for (int k = 0; k < 3; ++k) pixels[i + k] = static_cast<float>(std::clamp(c[k], 0.0, 1.0));
}

void LayoutImage::blend(int x, int y, const Color& c, double alpha) {
  const size_t i = index(x, y);
  for (int k = 0; k < 3; ++k) {
    const double v = alpha * c[k] + (1.0 - alpha) * static_cast<double>(pixels[i + k]);
    pixels[i + k] = static_cast<float>(std::clamp(v, 0.0, 1.0));
  }
}

double room_type_gray(int room_type) {
  return std::max(0.1, 1.0 - 0.06 * room_type);
}

int room_type_from_gray(double gray) {
  const double k = (1.0 - gray) / 0.06;
  const int type = static_cast<int>(std::lround(k));
  if (type < 1 || type > 15 || std::abs(k - type) > 0.2) return -1;
  return type;
}

double marker_depth_px(double depth_px) {
  return std::min(0.5 * depth_px, std::max(0.12 * depth_px, 1.5));
}

Scene strip_furniture(Scene scene) {
  scene.furniture.clear();
  return scene;
}

WorldTransform fit_transform(const Scene& scene, const Canvas& canvas) {
  const Aabb b = scene_bounds(scene);
  if (b.empty() || !(b.width() > 0) || !(b.height() > 0) || !std::isfinite(b.width()) ||
      !std::isfinite(b.height())) {
    fail(ErrorKind::kTransform, "scene bounding box is degenerate");
  }
  const double avail_w = canvas.width - 2.0 * canvas.margin;
  const double avail_h = canvas.height - 2.0 * canvas.margin;
  if (avail_w <= 0 || avail_h <= 0) fail(ErrorKind::kTransform, "margin leaves no drawing area");
  WorldTransform t;
  t.scale = std::min(avail_w / b.width(), avail_h / b.height());
  const double cx = (b.min_x + b.max_x) / 2, cy = (b.min_y + b.max_y) / 2;
  t.offset_x = canvas.width / 2.0 - t.scale * cx;
  t.offset_y = canvas.height / 2.0 - t.scale * cy;
  return t;
}

namespace {

// Removes floating-point noise so that pixel-center tests do not flip under
// translations of the scene.
double snap(double v) { return std::round(v * 1e6) / 1e6; }

struct PixelBox {
  Vec2 center;  // pixels
  double half_u = 0, half_v = 0;
  double cos_r = 1, sin_r = 0;
  double marker = 0;  // strip depth at the local +v edge, pixels

  // 0 outside, 1 body, 2 marker strip
  int classify(double px, double py) const {
    const double dx = px - center.x, dy = py - center.y;
    const double u = snap(cos_r * dx + sin_r * dy);
    const double v = snap(-sin_r * dx + cos_r * dy);
    if (u < -half_u || u >= half_u || v < -half_v || v >= half_v) return 0;
    return (marker > 0 && v >= half_v - marker) ? 2 : 1;
  }

  Aabb bounds() const {
    Aabb b = Aabb::empty_box();
    for (double su : {-1.0, 1.0}) {
      for (double sv : {-1.0, 1.0}) {
        b.expand(Vec2{center.x + cos_r * su * half_u - sin_r * sv * half_v,
                      center.y + sin_r * su * half_u + cos_r * sv * half_v});
      }
    }
    return b;
  }
};

PixelBox to_pixel_box(Vec2 center, double length, double width, double rotate_deg,
                      const WorldTransform& t) {
  PixelBox b;
  b.center = t.to_pixel(center);
  b.half_u = length * t.scale / 2;
  b.half_v = width * t.scale / 2;
  const double r = deg2rad(rotate_deg);
  b.cos_r = std::cos(r);
  b.sin_r = std::sin(r);
  return b;
}

template <class Fn>
void for_pixels(const LayoutImage& img, const Aabb& box, Fn&& fn) {
  const int x0 = std::max(0, static_cast<int>(std::floor(box.min_x)) - 1);
  const int y0 = std::max(0, static_cast<int>(std::floor(box.min_y)) - 1);
  const int x1 = std::min(img.width - 1, static_cast<int>(std::ceil(box.max_x)) + 1);
  const int y1 = std::min(img.height - 1, static_cast<int>(std::ceil(box.max_y)) + 1);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) fn(x, y);
  }
}

constexpr int kSuper = 4;

/// Draws body (alpha) plus front strip (marker alpha over body).
void draw_object(LayoutImage& img, const PixelBox& box, const Color& c, double alpha,
                 double marker_alpha, bool aa) {
  for_pixels(img, box.bounds(), [&](int x, int y) {
    if (!aa) {
      const int k = box.classify(x + 0.5, y + 0.5);
      if (k == 0) return;
      img.blend(x, y, c, alpha);
      if (k == 2) img.blend(x, y, c, marker_alpha);
      return;
    }
    int body = 0, mark = 0;
    for (int sy = 0; sy < kSuper; ++sy) {
      for (int sx = 0; sx < kSuper; ++sx) {
        const int k = box.classify(x + (sx + 0.5) / kSuper, y + (sy + 0.5) / kSuper);
        body += k != 0;
        mark += k == 2;
      }
    }
    if (body == 0) return;
    const double n = kSuper * kSuper;
    img.blend(x, y, c, alpha * body / n);
    if (mark) img.blend(x, y, c, marker_alpha * mark / n);
  });
}

void draw_solid(LayoutImage& img, const PixelBox& box, const Color& c, double alpha, bool aa) {
  draw_object(img, box, c, alpha, 0.0, aa);
}

/// Wall segment as a rectangle of `thick` pixels, extended by half the
/// thickness past both ends so corners close.
void draw_wall(LayoutImage& img, Vec2 a, Vec2 b, double thick, const Color& c, bool aa) {
  const Vec2 d = b - a;
  const double len = norm(d);
  if (len <= 0) return;
  PixelBox box;
  box.center = (a + b) * 0.5;
  box.half_u = len / 2 + thick / 2;
  box.half_v = thick / 2;
  box.cos_r = d.x / len;
  box.sin_r = d.y / len;
  draw_solid(img, box, c, 1.0, aa);
}

void draw_floorplan_layer(LayoutImage& img, const Scene& scene, const Palette& palette,
                          const Canvas& canvas) {
  const WorldTransform& t = img.transform;
  if (!scene.rooms.empty()) {
    const PaletteEntry* wall = palette.find_role(Role::kWall);
    if (!wall) fail(ErrorKind::kPalette, "palette has no wall entry");
    const Color wc = to_color(wall->color);
    const double thick = canvas.wall_thickness_cm * t.scale;
    for (const Room& r : scene.rooms) {
      const size_t n = r.wall_points.size();
      for (size_t i = 0; i < n && n >= 2; ++i) {
        draw_wall(img, t.to_pixel(r.wall_points[i]), t.to_pixel(r.wall_points[(i + 1) % n]), thick,
                  wc, canvas.antialias);
      }
    }
  }
  for (const Opening& o : scene.openings) {
    const Role role = o.kind == OpeningKind::kDoor ? Role::kDoor : Role::kWindow;
    const PaletteEntry* e = palette.find_role(role);
    if (!e) {
      fail(ErrorKind::kPalette,
           std::string("palette has no ") + (role == Role::kDoor ? "door" : "window") + " entry");
    }
    draw_solid(img, to_pixel_box({o.pos.x, o.pos.y}, o.length, o.width, o.rotate, t),
               to_color(e->color), e->alpha, canvas.antialias);
  }
}

void draw_room_fill(LayoutImage& img, const Scene& scene) {
  for (const Room& r : scene.rooms) {
    if (r.is_outline() || r.wall_points.size() < 3) continue;
    Polygon px;
    Aabb box = Aabb::empty_box();
    for (const Vec2& p : r.wall_points) {
      px.push_back(img.transform.to_pixel(p));
      box.expand(px.back());
    }
    const double g = room_type_gray(r.type);
    for_pixels(img, box, [&](int x, int y) {
      if (point_in_polygon({x + 0.5, y + 0.5}, px)) img.set(x, y, {g, g, g});
    });
  }
}

void draw_objects(LayoutImage& img, const std::vector<OrientedBox>& objects,
                  const Palette& palette, bool aa) {
  std::vector<const PaletteEntry*> entry(objects.size());
  for (size_t i = 0; i < objects.size(); ++i) {
    entry[i] = palette.find(objects[i].category);
    if (!entry[i]) {
      fail(ErrorKind::kPalette, "category '" + objects[i].category + "' missing from palette");
    }
  }
  std::vector<size_t> order(objects.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (entry[a]->layer != entry[b]->layer) return entry[a]->layer < entry[b]->layer;
    return objects[a].footprint_area() > objects[b].footprint_area();
  });
  for (size_t i : order) {
    const OrientedBox& o = objects[i];
    PixelBox box = to_pixel_box(o.center(), o.length, o.width, o.rotate, img.transform);
    box.marker = marker_depth_px(2 * box.half_v);
    draw_object(img, box, to_color(entry[i]->color), entry[i]->alpha, palette.marker_alpha(), aa);
  }
}

bool has_geometry(const Scene& s) {
  return !s.rooms.empty() || !s.openings.empty() || !s.furniture.empty();
}

LayoutImage blank(const Scene& scene, const Palette& palette, const Canvas& canvas) {
  LayoutImage img(canvas.width, canvas.height, to_color(palette.background()));
  if (has_geometry(scene)) {
    img.transform = fit_transform(scene, canvas);
  } else {
    img.transform = WorldTransform{1.0, canvas.width / 2.0, canvas.height / 2.0};
  }
  return img;
}

}  // namespace

LayoutImage rasterize_layout(const Scene& scene, const Palette& palette, const Canvas& canvas) {
  LayoutImage img = blank(scene, palette, canvas);
  draw_objects(img, scene.furniture, palette, canvas.antialias);
  draw_floorplan_layer(img, scene, palette, canvas);
  return img;
}

LayoutImage rasterize_floorplan(const Scene& scene, const Palette& palette, const Canvas& canvas) {
  LayoutImage img = blank(scene, palette, canvas);
  if (canvas.room_type_fill) draw_room_fill(img, scene);
  draw_floorplan_layer(img, scene, palette, canvas);
  return img;
}

WorldTransform fine_transform(const OrientedBox& parent, const Canvas& canvas) {
  WorldTransform t;
  t.scale = std::min(canvas.width, canvas.height) / kFineWindowCm;
  t.offset_x = canvas.width / 2.0 - t.scale * parent.pos.x;
  t.offset_y = canvas.height / 2.0 - t.scale * parent.pos.y;
  return t;
}

namespace {

constexpr double kOutlinePx = 2.0;

void draw_parent_outline(LayoutImage& img, const OrientedBox& parent, const PaletteEntry& e,
                         bool aa) {
  PixelBox outer = to_pixel_box(parent.center(), parent.length, parent.width, parent.rotate,
                                img.transform);
  PixelBox inner = outer;
  inner.half_u = std::max(0.0, outer.half_u - kOutlinePx);
  inner.half_v = std::max(0.0, outer.half_v - kOutlinePx);
  const Color c = to_color(e.color);
  for_pixels(img, outer.bounds(), [&](int x, int y) {
    if (!aa) {
      if (outer.classify(x + 0.5, y + 0.5) && !inner.classify(x + 0.5, y + 0.5)) {
        img.blend(x, y, c, e.alpha);
      }
      return;
    }
    int hits = 0;
    for (int sy = 0; sy < kSuper; ++sy) {
      for (int sx = 0; sx < kSuper; ++sx) {
        const double px = x + (sx + 0.5) / kSuper, py = y + (sy + 0.5) / kSuper;
        hits += outer.classify(px, py) && !inner.classify(px, py);
      }
    }
    if (hits) img.blend(x, y, c, e.alpha * hits / double(kSuper * kSuper));
  });
}

}  // namespace

LayoutImage rasterize_parent_boundary(const OrientedBox& parent, const Palette& palette,
                                      const Canvas& canvas) {
  return rasterize_fine_layout(parent, {}, palette, canvas);
}

LayoutImage rasterize_fine_layout(const OrientedBox& parent,
                                  const std::vector<OrientedBox>& children,
                                  const Palette& palette, const Canvas& canvas) {
  const PaletteEntry* e = palette.find(parent.category);
  if (!e) fail(ErrorKind::kPalette, "category '" + parent.category + "' missing from palette");
  LayoutImage img(canvas.width, canvas.height, to_color(palette.background()));
  img.transform = fine_transform(parent, canvas);
  const Aabb b = parent.bounds();
  const double half = kFineWindowCm / 2;
  if (b.min_x < parent.pos.x - half || b.max_x > parent.pos.x + half ||
      b.min_y < parent.pos.y - half || b.max_y > parent.pos.y + half) {
    img.warnings.push_back("parent footprint exceeds the 200 cm drawing area; clipped");
  }
  draw_objects(img, children, palette, canvas.antialias);
  draw_parent_outline(img, parent, *e, canvas.antialias);
  return img;
}

}  // namespace chord
