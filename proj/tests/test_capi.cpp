// Copyright 2026 The chord-layout Authors
// SPDX-License-Identifier: Apache-2.0

// Exercises the shared library through its C header only.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "chord/chord.h"

#include <cstdio>
#include <cstring>
#include <string>

#include "doctest.h"

#ifndef CHORD_DATA_DIR
#define CHORD_DATA_DIR "data"
#endif

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  chord_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(chord_status_name(CHORD_OK)) == "ok");
  CHECK(std::string(chord_status_name(CHORD_E_PARSE)) == "parse_error");
  CHECK(std::strlen(chord_version()) > 0);
}

TEST_CASE("parse errors come back as status plus message") {
  chord_scene* s = nullptr;
  CHECK(chord_scene_parse("{", &s) == CHORD_E_PARSE);
  CHECK(s == nullptr);
  CHECK(std::strlen(chord_last_error()) > 0);
  CHECK(chord_scene_parse(R"({"rooms": []})", &s) == CHORD_E_SCHEMA);
  CHECK(chord_scene_load("/nonexistent/scene.json", &s) == CHORD_E_IO);
  CHECK(chord_scene_parse(nullptr, &s) == CHORD_E_ARGUMENT);
}

TEST_CASE("toy scene through raster, detection and metrics") {
  chord_scene* scene = nullptr;
  REQUIRE(chord_toy_generate(3, nullptr, &scene) == CHORD_OK);
  int ok = 0;
  char* report = nullptr;
  REQUIRE(chord_scene_validate(scene, &ok, &report) == CHORD_OK);
  CHECK(ok == 1);
  take(report);

  chord_palette* pal = nullptr;
  REQUIRE(chord_palette_default(CHORD_LEVEL_HOUSE, &pal) == CHORD_OK);
  chord_canvas canvas;
  chord_canvas_init(&canvas);
  chord_image* layout = nullptr;
  REQUIRE(chord_rasterize(scene, pal, &canvas, CHORD_RASTER_LAYOUT, &layout) == CHORD_OK);
  int w = 0, h = 0;
  chord_image_size(layout, &w, &h);
  CHECK(w == canvas.width);
  CHECK(h == canvas.height);

  char* dets = nullptr;
  REQUIRE(chord_detect(layout, pal, &dets) == CHORD_OK);
  char* metrics = nullptr;
  REQUIRE(chord_objects_metrics(dets, &metrics) == CHORD_OK);
  take(dets);
  const std::string m = take(metrics);
  CHECK(m.find("\"intersecting_pairs\": 0,") != std::string::npos);

  char* json = nullptr;
  REQUIRE(chord_scene_to_json(scene, &json) == CHORD_OK);
  chord_scene* again = nullptr;
  CHECK(chord_scene_parse(json, &again) == CHORD_OK);
  take(json);

  chord_image_free(layout);
  chord_scene_free(again);
  chord_scene_free(scene);
  chord_palette_free(pal);
}

TEST_CASE("png round trip keeps the pixels") {
  chord_scene* scene = nullptr;
  REQUIRE(chord_toy_generate(5, nullptr, &scene) == CHORD_OK);
  chord_palette* pal = nullptr;
  chord_palette_default(CHORD_LEVEL_HOUSE, &pal);
  chord_canvas canvas;
  chord_canvas_init(&canvas);
  canvas.width = canvas.height = 64;
  chord_image* img = nullptr;
  REQUIRE(chord_rasterize(scene, pal, &canvas, CHORD_RASTER_LAYOUT, &img) == CHORD_OK);
  const std::string path = "capi_roundtrip.png";
  REQUIRE(chord_image_write_png(img, path.c_str()) == CHORD_OK);
  chord_image* back = nullptr;
  REQUIRE(chord_image_read_png(path.c_str(), &back) == CHORD_OK);
  char *a = nullptr, *b = nullptr;
  chord_detect(img, pal, &a);
  chord_detect(back, pal, &b);
  std::remove(path.c_str());
  // Without the transform sidecar the sizes differ in units, but the counts match.
  const std::string da = take(a), db = take(b);
  size_t na = 0, nb = 0;
  for (size_t p = da.find("\"type\""); p != std::string::npos; p = da.find("\"type\"", p + 1)) ++na;
  for (size_t p = db.find("\"type\""); p != std::string::npos; p = db.find("\"type\"", p + 1)) ++nb;
  CHECK(na == nb);
  chord_image_free(img);
  chord_image_free(back);
  chord_palette_free(pal);
  chord_scene_free(scene);
}

TEST_CASE("graph from the two-object listing") {
  chord_scene* scene = nullptr;
  REQUIRE(chord_scene_load(CHORD_DATA_DIR "/list1_scene.json", &scene) == CHORD_OK);
  chord_assets* assets = nullptr;
  REQUIRE(chord_assets_load(CHORD_DATA_DIR "/assets_demo.json", &assets) == CHORD_OK);
  chord_graph* g = nullptr;
  REQUIRE(chord_graph_from_scene(scene, assets, &g) == CHORD_OK);
  size_t rooms = 0, objects = 0, unassigned = 0, openings = 0;
  chord_graph_counts(g, &rooms, &objects, &unassigned, &openings);
  CHECK(rooms == 1);
  CHECK(objects == 2);
  CHECK(unassigned == 0);
  CHECK(openings == 2);
  char* json = nullptr;
  REQUIRE(chord_graph_to_json(g, -1, &json) == CHORD_OK);
  chord_graph* g2 = nullptr;
  REQUIRE(chord_graph_parse(json, &g2) == CHORD_OK);
  char* json2 = nullptr;
  chord_graph_to_json(g2, -1, &json2);
  CHECK(take(json) == take(json2));
  chord_palette* pal = nullptr;
  chord_palette_default(CHORD_LEVEL_HOUSE, &pal);
  char* svg = nullptr;
  REQUIRE(chord_graph_to_svg(g, pal, &svg) == CHORD_OK);
  CHECK(take(svg).find("<svg") != std::string::npos);
  chord_palette_free(pal);
  chord_graph_free(g);
  chord_graph_free(g2);
  chord_assets_free(assets);
  chord_scene_free(scene);
}

TEST_CASE("model create, save, load and sample at tiny size") {
  chord_palette* pal = nullptr;
  chord_palette_default(CHORD_LEVEL_HOUSE, &pal);
  chord_model_config cfg;
  chord_model_config_init(&cfg);
  cfg.widths[0] = cfg.widths[1] = cfg.widths[2] = 4;
  cfg.time_dim = 8;
  cfg.steps = 5;
  cfg.height = cfg.width = 16;
  chord_model* model = nullptr;
  REQUIRE(chord_model_create(&cfg, 1, pal, &model) == CHORD_OK);

  chord_scene* scene = nullptr;
  REQUIRE(chord_toy_generate(2, nullptr, &scene) == CHORD_OK);
  chord_canvas canvas;
  chord_canvas_init(&canvas);
  canvas.margin = 1;
  chord_train_config tc;
  chord_train_config_init(&tc);
  tc.epochs = 1;
  tc.batch_size = 1;
  const chord_scene* scenes[] = {scene};
  char* csv = nullptr;
  REQUIRE(chord_model_train(model, scenes, 1, pal, &canvas, &tc, nullptr, nullptr, &csv) ==
          CHORD_OK);
  CHECK(take(csv).rfind("epoch,mean_loss", 0) == 0);

  const std::string path = "capi_model.ckpt";
  REQUIRE(chord_model_save(model, path.c_str(), R"({"note":"test"})") == CHORD_OK);
  chord_model* loaded = nullptr;
  REQUIRE(chord_model_load(path.c_str(), &loaded) == CHORD_OK);
  std::remove(path.c_str());
  char* info = nullptr;
  REQUIRE(chord_model_info(loaded, &info) == CHORD_OK);
  CHECK(take(info).find("\"note\"") != std::string::npos);

  canvas.width = canvas.height = 16;
  chord_image* plan = nullptr;
  REQUIRE(chord_rasterize(scene, pal, &canvas, CHORD_RASTER_FLOORPLAN, &plan) == CHORD_OK);
  chord_image *s1 = nullptr, *s2 = nullptr;
  REQUIRE(chord_model_sample(model, plan, pal, 7, 1, &s1) == CHORD_OK);
  REQUIRE(chord_model_sample(loaded, plan, pal, 7, 1, &s2) == CHORD_OK);
  char *d1 = nullptr, *d2 = nullptr;
  chord_detect(s1, pal, &d1);
  chord_detect(s2, pal, &d2);
  CHECK(take(d1) == take(d2));

  chord_palette* fine = nullptr;
  chord_palette_default(CHORD_LEVEL_FINE, &fine);
  chord_image* wrong = nullptr;
  CHECK(chord_model_sample(model, plan, fine, 7, 1, &wrong) == CHORD_E_PALETTE);
  double score = 0;
  CHECK(chord_model_ood(model, plan, plan, pal, 1, 0, 99, 2, &score) == CHORD_E_ARGUMENT);

  chord_image_free(s1);
  chord_image_free(s2);
  chord_image_free(plan);
  chord_palette_free(fine);
  chord_palette_free(pal);
  chord_scene_free(scene);
  chord_model_free(model);
  chord_model_free(loaded);
}

TEST_CASE("rank-sum through the C API") {
  const double hi[] = {5, 6, 7}, lo[] = {1, 2, 3};
  double u = 0, z = 0, p = 0;
  REQUIRE(chord_rank_sum(hi, 3, lo, 3, &u, &z, &p) == CHORD_OK);
  CHECK(u == 9);
  CHECK(p < 0.03);
  CHECK(chord_rank_sum(hi, 0, lo, 3, &u, &z, &p) == CHORD_E_ARGUMENT);
}
