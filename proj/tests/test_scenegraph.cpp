// Copyright 2026 The chord-layout Authors
// SPDX-License-Identifier: Apache-2.0

#include "chord/scenegraph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chord/error.hpp"
#include "chord/rng.hpp"
#include "doctest.h"

using namespace chord;

#ifndef CHORD_DATA_DIR
#define CHORD_DATA_DIR "data"
#endif

namespace {

OrientedBox obj(const std::string& cat, double x, double y, double l, double w, double rot = 0) {
  OrientedBox b;
  b.category = cat;
  b.pos = {x, y, 0};
  b.length = l;
  b.width = w;
  b.height = 80;
  b.rotate = rot;
  return b;
}

Detection det(const OrientedBox& b) {
  Detection d;
  d.box = b;
  d.confidence = 1.0;
  return d;
}

bool rectilinear(const Polygon& p) {
  for (size_t i = 0; i < p.size(); ++i) {
    const Vec2 a = p[i], b = p[(i + 1) % p.size()];
    if (a.x != b.x && a.y != b.y) return false;
  }
  return true;
}

bool has_flag(const std::vector<std::string>& flags, const std::string& f) {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

// Knows the clean image and answers with exactly the noise in x_t.
class MemorizingDenoiser : public Denoiser {
 public:
  MemorizingDenoiser(Tensor x0, const NoiseSchedule& s) : x0_(std::move(x0)), s_(s) {}
  Tensor predict(const Tensor& xt, const Tensor&, int t) const override {
    Tensor eps(xt.c, xt.h, xt.w);
    const double a = std::sqrt(s_.alpha_bar(t)), b = std::sqrt(1 - s_.alpha_bar(t));
    for (size_t i = 0; i < xt.size(); ++i) {
      eps.data[i] = static_cast<float>((xt.data[i] - a * x0_.data[i]) / b);
    }
    return eps;
  }

 private:
  Tensor x0_;
  const NoiseSchedule& s_;
};

}  // namespace

TEST_CASE("straightening a clean rectangle is a no-op") {
  const Polygon r = {{0, 0}, {400, 0}, {400, 300}, {0, 300}};
  const StraightenResult s = straighten_polygon(r);
  CHECK_FALSE(s.reverted);
  CHECK(s.points == r);
  CHECK_THROWS_AS(straighten_polygon(Polygon{{0, 0}, {1, 0}}), Error);
}

TEST_CASE("jittered rectilinear loops come back exactly rectilinear") {
  Rng rng(4);
  const Polygon l = {{0, 0}, {600, 0}, {600, 300}, {300, 300}, {300, 500}, {0, 500}};
  for (int trial = 0; trial < 50; ++trial) {
    Polygon noisy = l;
    for (Vec2& p : noisy) {
      p.x += rng.uniform(-3, 3);
      p.y += rng.uniform(-3, 3);
    }
    const StraightenResult s = straighten_polygon(noisy);
    REQUIRE_FALSE(s.reverted);
    CHECK(s.points.size() == 6);
    CHECK(rectilinear(s.points));
    CHECK(std::abs(signed_area(s.points) - signed_area(l)) < 0.02 * signed_area(l));
    // Idempotent.
    CHECK(straighten_polygon(s.points).points == s.points);
  }
}

TEST_CASE("diagonal walls are left alone and collinear points dropped") {
  const Polygon diamond = {{0, 100}, {100, 0}, {200, 100}, {100, 200}};
  CHECK(straighten_polygon(diamond).points == diamond);
  const Polygon extra = {{0, 0}, {200, 0}, {400, 0}, {400, 300}, {0, 300}};
  CHECK(straighten_polygon(extra).points.size() == 4);
}

TEST_CASE("openings snap to the nearest wall") {
  const std::vector<Polygon> rooms = {{{0, 0}, {400, 0}, {400, 300}, {0, 300}}};
  Opening near;
  near.pos = {200, 5, 0};
  near.length = 90;
  near.width = 12;
  near.height = 210;
  near.rotate = 3;
  Opening on = near;
  on.pos = {400, 150, 0};
  on.rotate = 90;
  Opening far = near;
  far.pos = {2000, 2000, 0};
  const auto a = attach_openings({near, on, far}, rooms);
  REQUIRE(a.size() == 3);
  CHECK(a[0].attached);
  CHECK(a[0].opening.pos.y == doctest::Approx(0));
  CHECK(a[0].opening.pos.x == doctest::Approx(200));
  CHECK(a[0].opening.rotate == doctest::Approx(0));
  CHECK(a[0].distance == doctest::Approx(5));
  CHECK(a[0].edge == 0);
  CHECK(a[1].attached);
  CHECK(a[1].distance == doctest::Approx(0));
  CHECK(a[1].opening.pos.x == doctest::Approx(400));
  CHECK(angle_distance(a[1].opening.rotate, 90) < 1e-9);
  CHECK_FALSE(a[2].attached);
  CHECK(a[2].opening == far);
}

TEST_CASE("objects go to the room holding their centroid") {
  const std::vector<Polygon> rooms = {{{0, 0}, {400, 0}, {400, 300}, {0, 300}},
                                      {{400, 0}, {800, 0}, {800, 300}, {400, 300}}};
  const auto idx = assign_to_rooms({obj("bed", 100, 100, 50, 50), obj("bed", 600, 100, 50, 50),
                                    obj("bed", 2000, 100, 50, 50),
                                    // Centroid on the shared wall, mostly in the right room.
                                    obj("bed", 400, 150, 10, 10), obj("bed", 420, 150, 120, 10)},
                                   rooms);
  CHECK(idx[0] == 0);
  CHECK(idx[1] == 1);
  CHECK(idx[2] == -1);
  CHECK((idx[3] == 0 || idx[3] == 1));
  CHECK(idx[4] == 1);
}

TEST_CASE("asset retrieval minimizes squared size error within the category") {
  const AssetDatabase db("t", {{"bed_small", "bed", 160, 85, 50, ""},
                               {"bed_wide", "bed", 190, 110, 50, ""},
                               {"sofa_a", "sofa", 200, 90, 80, ""}});
  const auto r = retrieve_asset(obj("bed", 0, 0, 180, 90), db);
  REQUIRE(r.has_value());
  // (20^2 + 5^2) = 425 beats (10^2 + 20^2) = 500.
  CHECK(r->asset_id == "bed_small");
  CHECK(r->source == "t");
  CHECK_FALSE(retrieve_asset(obj("piano", 0, 0, 100, 100), db).has_value());

  // Brute force over random databases; ties go to the smaller id.
  Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<AssetRef> entries;
    for (int i = 0; i < 12; ++i) {
      entries.push_back({"a" + std::to_string(100 + i), "table",
                         std::round(rng.uniform(50, 200) / 10) * 10,
                         std::round(rng.uniform(50, 200) / 10) * 10, 70, ""});
    }
    const AssetDatabase d("r", entries);
    const OrientedBox q = obj("table", 0, 0, std::round(rng.uniform(50, 200) / 10) * 10,
                              std::round(rng.uniform(50, 200) / 10) * 10);
    const AssetRef* best = nullptr;
    double best_cost = INFINITY;
    for (const AssetRef& e : entries) {
      const double c = std::pow(e.length - q.length, 2) + std::pow(e.width - q.width, 2);
      if (c < best_cost || (c == best_cost && e.asset_id < best->asset_id)) {
        best_cost = c;
        best = &e;
      }
    }
    CHECK(retrieve_asset(q, d)->asset_id == best->asset_id);
  }
  CHECK_THROWS_AS(AssetDatabase("x", {{"a", "bed", 1, 1, 1, ""}, {"a", "bed", 2, 2, 2, ""}}), Error);
  CHECK_THROWS_AS(AssetDatabase("x", {{"a", "bed", 0, 1, 1, ""}}), Error);
}

TEST_CASE("the two-object listing builds one living room with a door and a window") {
  const Scene s = load_scene(CHORD_DATA_DIR "/list1_scene.json");
  const AssetDatabase db = AssetDatabase::load(CHORD_DATA_DIR "/assets_demo.json");
  const SceneGraph g = build_scene_graph(s, db);
  REQUIRE(g.rooms.size() == 1);
  CHECK(g.rooms[0].name == "living");
  CHECK(g.rooms[0].objects.size() == 2);
  CHECK(g.unassigned.empty());
  REQUIRE(g.openings.size() == 2);
  for (const OpeningNode& o : g.openings) {
    CHECK(o.attached);
    CHECK(o.room == g.rooms[0].id);
  }
  for (const ObjectNode& o : g.rooms[0].objects) CHECK(o.asset.has_value());
  CHECK(graph_from_json(graph_to_json(g)) == g);
}

TEST_CASE("empty graph serializes to the bare house record") {
  CHECK(graph_to_json(SceneGraph{}) == R"({"house":{"rooms":[],"unassigned":[]}})");
  CHECK(graph_from_json(graph_to_json(SceneGraph{})) == SceneGraph{});
  const std::string svg = export_svg(SceneGraph{}, Palette::house_default());
  CHECK(svg.find("viewBox=\"0.00 0.00 100.00 100.00\"") != std::string::npos);
}

TEST_CASE("graph JSON round trip on toy scenes; every object lands in a room") {
  const AssetDatabase db = AssetDatabase::load(CHORD_DATA_DIR "/assets_demo.json");
  for (uint64_t seed = 1; seed <= 25; ++seed) {
    if (seed == 23) continue;  // no placement for this seed under the default config
    const Scene s = generate_toy_scene(seed, ToyConfig{});
    const SceneGraph g = build_scene_graph(s, db);
    CHECK(g.object_count() == s.furniture.size());
    CHECK(g.unassigned.empty());
    CHECK(graph_from_json(graph_to_json(g, 2)) == g);
    const std::string svg = export_svg(g, Palette::house_default());
    CHECK(svg == export_svg(g, Palette::house_default()));
    size_t n = 0;
    for (size_t p = svg.find("class=\"object\""); p != std::string::npos;
         p = svg.find("class=\"object\"", p + 1)) {
      ++n;
    }
    CHECK(n == s.furniture.size());
  }
}

TEST_CASE("graph parse errors") {
  CHECK_THROWS_AS(graph_from_json("{"), Error);
  try {
    graph_from_json(R"({"rooms": []})");
    FAIL("expected a schema error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kSchema);
  }
}

TEST_CASE("parent frame conversion inverts") {
  const OrientedBox parent = obj("coffee_table", 300, 200, 120, 60, 30);
  const OrientedBox child = obj("table_lamp", 310, 215, 20, 20, 75);
  const OrientedBox local = to_parent_frame(child, parent);
  CHECK(local.rotate == doctest::Approx(45));
  const OrientedBox back = from_parent_frame(local, parent);
  CHECK(back.pos.x == doctest::Approx(child.pos.x));
  CHECK(back.pos.y == doctest::Approx(child.pos.y));
  CHECK(angle_distance(back.rotate, child.rotate) < 1e-9);
}

TEST_CASE("children inside, overhanging, straddling and outside the parent") {
  const OrientedBox parent = obj("coffee_table", 0, 0, 100, 60);
  const std::vector<Detection> dets = {
      det(obj("coffee_table", 0, 0, 100, 60)),  // the outline itself
      det(obj("table_lamp", 0, 0, 20, 20)),
      det(obj("laptop", 48, 0, 20, 20)),        // 8 cm over, tolerance 0.15 * 20 = 3 -> clipped
      det(obj("coffee_cup", 51, 0, 4, 20)),     // 3 cm over a 20 deep cup: overhang
      det(obj("magazine", 200, 0, 20, 20)),
  };
  const FineResult r = place_children(parent, dets);
  REQUIRE(r.children.size() == 3);
  REQUIRE(r.discarded.size() == 1);
  CHECK(r.children[0].box.category == "table_lamp");
  // No asset database: only the retrieval flag.
  CHECK(r.children[0].flags == std::vector<std::string>{"no_match"});
  CHECK(r.children[0].box.pos.z == doctest::Approx(80));
  CHECK(r.children[1].box.category == "laptop");
  CHECK(has_flag(r.children[1].flags, "clipped"));
  CHECK(r.children[1].box.length == doctest::Approx(12));
  CHECK(r.children[1].box.pos.x == doctest::Approx(44));
  CHECK(has_flag(r.children[2].flags, "overhang"));
  CHECK(has_flag(r.discarded[0].flags, "outside_parent"));
}

TEST_CASE("fine generation with a memorizing denoiser recovers the lamp") {
  const Palette pal = Palette::fine_default();
  Canvas canvas;
  canvas.width = canvas.height = 64;
  canvas.margin = 0;
  ObjectNode parent;
  parent.id = "object_0";
  parent.box = obj("coffee_table", 500, 300, 120, 70, 0);
  const OrientedBox lamp = obj("table_lamp", 520, 310, 30, 30, 0);
  const Tensor x0 = image_to_tensor(rasterize_fine_layout(parent.box, {lamp}, pal, canvas));
  const NoiseSchedule sched = make_schedule(50, 1e-4, 0.05);
  const MemorizingDenoiser oracle(x0, sched);
  Rng rng(1);
  const FineResult r = fine_grained_generate(parent, oracle, pal, sched, rng, canvas);
  REQUIRE(r.children.size() == 1);
  const ObjectNode& c = r.children[0];
  CHECK(c.id == "object_0/child_0");
  CHECK(c.box.category == "table_lamp");
  // One pixel is 200 / 64 cm.
  CHECK(std::abs(c.box.pos.x - 20) < 2 * 200.0 / 64);
  CHECK(std::abs(c.box.pos.y - 10) < 2 * 200.0 / 64);
  CHECK(std::abs(c.box.length - 30) < 2 * 200.0 / 64);

  ObjectNode sofa;
  sofa.box = obj("sofa", 0, 0, 200, 90);
  CHECK_THROWS_AS(fine_grained_generate(sofa, oracle, pal, sched, rng, canvas), Error);
}
