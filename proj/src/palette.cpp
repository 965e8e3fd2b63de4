// Copyright 2026 The chord-layout Authors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include "json.hpp"
#include <set>
#include <sstream>

#include "chord/error.hpp"
#include "chord/raster.hpp"

namespace chord {

using nlohmann::json;

namespace {

const char* role_name(Role r) {
  switch (r) {
    case Role::kObject: return "object";
    case Role::kWall: return "wall";
    case Role::kDoor: return "door";
    case Role::kWindow: return "window";
  }
  return "object";
}

Role parse_role(const std::string& s) {
  if (s == "object") return Role::kObject;
  if (s == "wall") return Role::kWall;
  if (s == "door") return Role::kDoor;
  if (s == "window") return Role::kWindow;
  fail(ErrorKind::kPalette, "unknown palette role '" + s + "'");
}

Palette from_categories(Level level, const std::vector<Category>& cats) {
  std::vector<PaletteEntry> entries;
  for (const Category& c : cats) {
    PaletteEntry e;
    e.name = c.name;
    e.role = c.role;
    e.color = c.color;
    e.alpha = c.role == Role::kObject ? Palette::kObjectAlpha : 1.0;
    e.layer = 0;
    entries.push_back(std::move(e));
  }
  return Palette(level, std::move(entries));
}

}  // namespace

Palette::Palette(Level level, std::vector<PaletteEntry> entries, Rgb8 background,
                 double marker_alpha)
    : level_(level),
      entries_(std::move(entries)),
      background_(background),
      marker_alpha_(marker_alpha) {
  std::set<std::string> names;
  std::set<uint32_t> colors;
  for (const PaletteEntry& e : entries_) {
    if (!names.insert(e.name).second) {
      fail(ErrorKind::kPalette, "duplicate palette category '" + e.name + "'");
    }
    const uint32_t key = (uint32_t{e.color.r} << 16) | (uint32_t{e.color.g} << 8) | e.color.b;
    if (!colors.insert(key).second) {
      fail(ErrorKind::kPalette, "duplicate palette color " + to_hex(e.color) + " ('" + e.name + "')");
    }
    if (!(e.alpha > 0.0 && e.alpha <= 1.0)) {
      fail(ErrorKind::kPalette, "alpha of '" + e.name + "' must be in (0, 1]");
    }
  }
  if (!(marker_alpha_ > 0.0 && marker_alpha_ <= 1.0)) {
    fail(ErrorKind::kPalette, "marker alpha must be in (0, 1]");
  }
}

Palette Palette::house_default() { return from_categories(Level::kHouse, house_categories()); }

Palette Palette::fine_default() { return from_categories(Level::kFine, fine_categories()); }

Palette Palette::from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kParse, "palette: malformed JSON at byte " + std::to_string(e.byte));
  }
  try {
    const std::string level = doc.value("level", "house");
    if (level != "house" && level != "fine") fail(ErrorKind::kPalette, "palette level must be house or fine");
    const auto bg = parse_hex_color(doc.value("background", "FFFFFF"));
    if (!bg) fail(ErrorKind::kPalette, "palette: bad background color");
    std::vector<PaletteEntry> entries;
    for (const json& j : doc.at("entries")) {
      PaletteEntry e;
      e.name = j.at("name").get<std::string>();
      const auto c = parse_hex_color(j.at("color").get<std::string>());
      if (!c) fail(ErrorKind::kPalette, "palette: bad color for '" + e.name + "'");
      e.color = *c;
      e.role = parse_role(j.value("role", "object"));
      e.alpha = j.value("alpha", e.role == Role::kObject ? kObjectAlpha : 1.0);
      e.layer = j.value("layer", 0);
      entries.push_back(std::move(e));
    }
    return Palette(level == "fine" ? Level::kFine : Level::kHouse, std::move(entries), *bg,
                   doc.value("marker_alpha", kMarkerAlpha));
  } catch (const json::exception& e) {
    fail(ErrorKind::kSchema, std::string("palette: ") + e.what());
  }
}

Palette Palette::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open palette file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::string Palette::to_json() const {
  json doc;
  doc["level"] = level_ == Level::kFine ? "fine" : "house";
  doc["background"] = to_hex(background_);
  doc["marker_alpha"] = marker_alpha_;
  doc["entries"] = json::array();
  for (const PaletteEntry& e : entries_) {
    doc["entries"].push_back({{"name", e.name},
                              {"color", to_hex(e.color)},
                              {"role", role_name(e.role)},
                              {"alpha", e.alpha},
                              {"layer", e.layer}});
  }
  return doc.dump(2);
}

const PaletteEntry* Palette::find(std::string_view name) const {
  for (const PaletteEntry& e : entries_) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

const PaletteEntry* Palette::find_role(Role role) const {
  for (const PaletteEntry& e : entries_) {
    if (e.role == role) return &e;
  }
  return nullptr;
}

int Palette::index_of(std::string_view name) const {
  for (size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

Color Palette::body_color(const PaletteEntry& e) const {
  const Color c = to_color(e.color), bg = to_color(background_);
  return {e.alpha * c[0] + (1 - e.alpha) * bg[0], e.alpha * c[1] + (1 - e.alpha) * bg[1],
          e.alpha * c[2] + (1 - e.alpha) * bg[2]};
}

Color Palette::marker_color(const PaletteEntry& e) const {
  const Color body = body_color(e), c = to_color(e.color);
  const double a = marker_alpha_;
  return {a * c[0] + (1 - a) * body[0], a * c[1] + (1 - a) * body[1], a * c[2] + (1 - a) * body[2]};
}

uint64_t Palette::hash() const {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : json::parse(to_json()).dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace chord
