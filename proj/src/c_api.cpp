// Copyright 2026 The chord-layout Authors
// SPDX-License-Identifier: Apache-2.0

#include "chord/chord.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "chord/diffusion.hpp"
#include "chord/error.hpp"
#include "chord/image_io.hpp"
#include "chord/metrics.hpp"
#include "chord/perception.hpp"
#include "chord/raster.hpp"
#include "chord/scene.hpp"
#include "chord/scenegraph.hpp"
#include "json.hpp"

#ifndef CHORD_VERSION_STRING
#define CHORD_VERSION_STRING "0.0.0"
#endif

struct chord_scene {
  chord::Scene scene;
};
struct chord_palette {
  chord::Palette palette;
};
struct chord_image {
  chord::LayoutImage image;
};
struct chord_model {
  chord::Checkpoint meta;  // everything but the live parameters
  chord::TinyUNetDenoiser net;
};
struct chord_assets {
  chord::AssetDatabase db;
};
struct chord_graph {
  chord::SceneGraph graph;
};

namespace {

using nlohmann::json;

thread_local std::string g_last_error;

template <class F>
chord_status guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    return CHORD_OK;
  } catch (const chord::Error& e) {
    g_last_error = e.what();
    return static_cast<chord_status>(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown failure";
  }
  return CHORD_E_INTERNAL;
}

template <class T>
void need(const T* p, const char* what) {
  if (!p) chord::fail(chord::ErrorKind::kArgument, std::string(what) + " must not be NULL");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void put(char** out, const std::string& s) {
  need(out, "out");
  *out = dup(s);
}

json metrics_json(const chord::SceneMetrics& m) {
  return {{"por", m.por},
          {"piou", m.piou},
          {"piou_intersecting", m.piou_intersecting},
          {"objects", m.object_count},
          {"pairs", m.pair_count},
          {"intersecting_pairs", m.intersecting_pairs},
          {"rooms", m.room_count},
          {"empty_rooms", m.empty_room_count}};
}

chord::Canvas to_canvas(const chord_canvas* c) {
  chord::Canvas out;
  if (!c) return out;
  out.width = c->width;
  out.height = c->height;
  out.margin = c->margin;
  out.wall_thickness_cm = c->wall_thickness_cm;
  out.antialias = c->antialias != 0;
  out.room_type_fill = c->room_type_fill != 0;
  return out;
}

// At the fine level a scene carries the parent as its first fine-parent
// furniture record and the tabletop items as the rest.
bool split_fine(const chord::Scene& s, chord::OrientedBox& parent,
                std::vector<chord::OrientedBox>& children) {
  bool found = false;
  children.clear();
  for (const chord::OrientedBox& b : s.furniture) {
    if (!found && chord::is_fine_parent(b.category)) {
      parent = b;
      found = true;
    } else {
      children.push_back(b);
    }
  }
  return found;
}

chord::LayoutImage render(const chord::Scene& s, const chord::Palette& p, const chord::Canvas& c,
                          chord_raster_kind kind) {
  if (kind != CHORD_RASTER_LAYOUT && kind != CHORD_RASTER_FLOORPLAN) {
    chord::fail(chord::ErrorKind::kArgument, "unknown raster kind");
  }
  if (p.level() == chord::Level::kFine) {
    chord::OrientedBox parent;
    std::vector<chord::OrientedBox> children;
    if (!split_fine(s, parent, children)) {
      chord::fail(chord::ErrorKind::kArgument, "fine-level scene needs a table-like parent record");
    }
    return chord::quantize_8bit(kind == CHORD_RASTER_LAYOUT
                                    ? chord::rasterize_fine_layout(parent, children, p, c)
                                    : chord::rasterize_parent_boundary(parent, p, c));
  }
  return chord::quantize_8bit(kind == CHORD_RASTER_LAYOUT ? chord::rasterize_layout(s, p, c)
                                                          : chord::rasterize_floorplan(s, p, c));
}

void check_size(const chord_model* m, const chord::LayoutImage& img, const char* what) {
  if (img.width != m->meta.image_width || img.height != m->meta.image_height) {
    chord::fail(chord::ErrorKind::kTensor,
                std::string(what) + " is " + std::to_string(img.width) + "x" +
                    std::to_string(img.height) + ", the model expects " +
                    std::to_string(m->meta.image_width) + "x" +
                    std::to_string(m->meta.image_height));
  }
}

void sync_params(chord_model* m) { m->meta.parameters = m->net.net().parameters(); }

}  // namespace

extern "C" {

const char* chord_version(void) { return CHORD_VERSION_STRING; }

const char* chord_status_name(chord_status status) {
  if (status == CHORD_OK) return "ok";
  if (status == CHORD_E_INTERNAL) return "internal_error";
  if (status >= CHORD_E_PARSE && status <= CHORD_E_ARGUMENT) {
    return chord::error_kind_name(static_cast<chord::ErrorKind>(status));
  }
  return "unknown_status";
}

const char* chord_last_error(void) { return g_last_error.c_str(); }

void chord_string_free(char* s) { std::free(s); }

// ---- scenes ---------------------------------------------------------------

chord_status chord_scene_parse(const char* text, chord_scene** out) {
  return guard([&] {
    need(text, "json");
    need(out, "out");
    *out = new chord_scene{chord::parse_scene(text)};
  });
}

chord_status chord_scene_load(const char* path, chord_scene** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new chord_scene{chord::load_scene(path)};
  });
}

chord_status chord_scene_to_json(const chord_scene* scene, char** out) {
  return guard([&] {
    need(scene, "scene");
    put(out, chord::serialize_scene(scene->scene));
  });
}

void chord_scene_free(chord_scene* scene) { delete scene; }

chord_status chord_scene_validate(const chord_scene* scene, int* ok, char** report) {
  return guard([&] {
    need(scene, "scene");
    const chord::ValidationReport r = chord::validate_scene(scene->scene);
    if (ok) *ok = r.ok() ? 1 : 0;
    if (report) *report = dup(r.to_json());
  });
}

chord_status chord_scene_metrics(const chord_scene* scene, char** out) {
  return guard([&] {
    need(scene, "scene");
    put(out, metrics_json(chord::scene_metrics(scene->scene)).dump(2));
  });
}

chord_status chord_objects_metrics(const char* objects_json, char** out) {
  return guard([&] {
    need(objects_json, "objects_json");
    std::vector<chord::OrientedBox> boxes;
    for (const chord::Detection& d : chord::detections_from_json(objects_json)) {
      boxes.push_back(d.box);
    }
    put(out, metrics_json(chord::object_metrics(boxes)).dump(2));
  });
}

chord_status chord_corpus_stats(const chord_scene* const* scenes, size_t count,
                                chord_stats_format format, char** out) {
  return guard([&] {
    if (count) need(scenes, "scenes");
    std::vector<chord::Scene> list;
    list.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      need(scenes[i], "scene");
      list.push_back(scenes[i]->scene);
    }
    const chord::CorpusMetrics m = chord::corpus_metrics(list);
    switch (format) {
      case CHORD_STATS_JSON: put(out, m.to_json()); break;
      case CHORD_STATS_TABLE: put(out, m.to_table()); break;
      case CHORD_STATS_CATEGORY_CSV: put(out, m.category_csv()); break;
      case CHORD_STATS_ROOMS_CSV: put(out, m.rooms_per_house_csv()); break;
      default: chord::fail(chord::ErrorKind::kArgument, "unknown stats format");
    }
  });
}

chord_status chord_toy_generate(uint64_t seed, const char* config, chord_scene** out) {
  return guard([&] {
    need(out, "out");
    const chord::ToyConfig c = chord::ToyConfig::parse(config ? config : "");
    *out = new chord_scene{chord::generate_toy_scene(seed, c)};
  });
}

chord_status chord_toy_config(const char* config, char** out) {
  return guard([&] { put(out, chord::ToyConfig::parse(config ? config : "").to_text()); });
}

// ---- palettes -------------------------------------------------------------

chord_status chord_palette_default(chord_level level, chord_palette** out) {
  return guard([&] {
    need(out, "out");
    if (level != CHORD_LEVEL_HOUSE && level != CHORD_LEVEL_FINE) {
      chord::fail(chord::ErrorKind::kArgument, "unknown palette level");
    }
    *out = new chord_palette{level == CHORD_LEVEL_HOUSE ? chord::Palette::house_default()
                                                        : chord::Palette::fine_default()};
  });
}

chord_status chord_palette_load(const char* path, chord_palette** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new chord_palette{chord::Palette::load(path)};
  });
}

chord_status chord_palette_to_json(const chord_palette* palette, char** out) {
  return guard([&] {
    need(palette, "palette");
    put(out, palette->palette.to_json());
  });
}

uint64_t chord_palette_hash(const chord_palette* palette) {
  return palette ? palette->palette.hash() : 0;
}

void chord_palette_free(chord_palette* palette) { delete palette; }

// ---- images ---------------------------------------------------------------

void chord_canvas_init(chord_canvas* canvas) {
  if (!canvas) return;
  const chord::Canvas c;
  canvas->width = c.width;
  canvas->height = c.height;
  canvas->margin = c.margin;
  canvas->wall_thickness_cm = c.wall_thickness_cm;
  canvas->antialias = c.antialias ? 1 : 0;
  canvas->room_type_fill = c.room_type_fill ? 1 : 0;
}

chord_status chord_rasterize(const chord_scene* scene, const chord_palette* palette,
                             const chord_canvas* canvas, chord_raster_kind kind,
                             chord_image** out) {
  return guard([&] {
    need(scene, "scene");
    need(palette, "palette");
    need(out, "out");
    *out = new chord_image{render(scene->scene, palette->palette, to_canvas(canvas), kind)};
  });
}

chord_status chord_image_read_png(const char* path, chord_image** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new chord_image{chord::read_png(path)};
  });
}

chord_status chord_image_write_png(const chord_image* image, const char* path) {
  return guard([&] {
    need(image, "image");
    need(path, "path");
    chord::write_png(image->image, path);
  });
}

void chord_image_size(const chord_image* image, int* width, int* height) {
  if (width) *width = image ? image->image.width : 0;
  if (height) *height = image ? image->image.height : 0;
}

void chord_image_transform(const chord_image* image, double out[3]) {
  if (!image || !out) return;
  out[0] = image->image.transform.scale;
  out[1] = image->image.transform.offset_x;
  out[2] = image->image.transform.offset_y;
}

chord_status chord_image_warnings(const chord_image* image, char** out) {
  return guard([&] {
    need(image, "image");
    put(out, json(image->image.warnings).dump());
  });
}

void chord_image_free(chord_image* image) { delete image; }

// ---- perception -----------------------------------------------------------

chord_status chord_detect(const chord_image* layout, const chord_palette* palette,
                          char** detections_json) {
  return guard([&] {
    need(layout, "layout");
    need(palette, "palette");
    put(detections_json,
        chord::detections_to_json(chord::detect_objects(layout->image, palette->palette)));
  });
}

// ---- diffusion ------------------------------------------------------------

void chord_model_config_init(chord_model_config* config) {
  if (!config) return;
  const chord::UNetConfig u;
  for (int i = 0; i < 3; ++i) config->widths[i] = u.widths[i];
  config->time_dim = u.time_dim;
  config->steps = 1000;
  config->beta_start = 1e-4;
  config->beta_end = 0.02;
  config->height = 64;
  config->width = 64;
}

void chord_train_config_init(chord_train_config* config) {
  if (!config) return;
  const chord::TrainConfig t;
  config->learning_rate = t.learning_rate;
  config->decay_factor = t.decay_factor;
  config->milestones = nullptr;
  config->milestone_count = 0;
  config->batch_size = t.batch_size;
  config->epochs = t.epochs;
  config->max_steps = t.max_steps;
  config->seed = t.seed;
  config->threads = t.threads;
  config->grad_clip = t.grad_clip;
}

chord_status chord_model_create(const chord_model_config* config, uint64_t seed,
                                const chord_palette* palette, chord_model** out) {
  return guard([&] {
    need(config, "config");
    need(palette, "palette");
    need(out, "out");
    if (config->height <= 0 || config->width <= 0 || config->height % 4 || config->width % 4) {
      chord::fail(chord::ErrorKind::kArgument, "image size must be positive and divisible by 4");
    }
    chord::UNetConfig u;
    u.widths = {config->widths[0], config->widths[1], config->widths[2]};
    u.time_dim = config->time_dim;
    chord::Checkpoint meta;
    meta.unet = u;
    meta.schedule = chord::make_schedule(config->steps, config->beta_start, config->beta_end);
    meta.palette_hash = palette->palette.hash();
    meta.image_height = config->height;
    meta.image_width = config->width;
    meta.seed = seed;
    auto* m = new chord_model{std::move(meta), chord::TinyUNetDenoiser(u, seed)};
    sync_params(m);
    *out = m;
  });
}

chord_status chord_model_train(chord_model* model, const chord_scene* const* scenes, size_t count,
                               const chord_palette* palette, const chord_canvas* canvas,
                               const chord_train_config* config, chord_epoch_callback on_epoch,
                               void* user, char** loss_csv) {
  return guard([&] {
    need(model, "model");
    need(palette, "palette");
    need(config, "config");
    if (count) need(scenes, "scenes");
    model->meta.require_palette(palette->palette.hash());
    chord::Canvas c = to_canvas(canvas);
    c.width = model->meta.image_width;
    c.height = model->meta.image_height;
    std::vector<chord::TrainingPair> data;
    data.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      need(scenes[i], "scene");
      data.push_back({chord::image_to_tensor(render(scenes[i]->scene, palette->palette, c, CHORD_RASTER_LAYOUT)),
                      chord::image_to_tensor(render(scenes[i]->scene, palette->palette, c, CHORD_RASTER_FLOORPLAN))});
    }
    chord::TrainConfig t;
    t.learning_rate = config->learning_rate;
    t.decay_factor = config->decay_factor;
    if (config->milestone_count) need(config->milestones, "milestones");
    t.milestones.assign(config->milestones, config->milestones + config->milestone_count);
    t.batch_size = config->batch_size;
    t.epochs = config->epochs;
    t.max_steps = config->max_steps;
    t.seed = config->seed;
    t.threads = config->threads;
    t.grad_clip = config->grad_clip;
    std::function<void(int, double)> cb;
    if (on_epoch) cb = [&](int e, double l) { on_epoch(e, l, user); };
    const chord::TrainResult r = chord::train(model->net, data, model->meta.schedule, t, cb);
    sync_params(model);
    if (loss_csv) *loss_csv = dup(r.loss_csv());
  });
}

chord_status chord_model_save(const chord_model* model, const char* path, const char* metadata) {
  return guard([&] {
    need(model, "model");
    need(path, "path");
    chord::Checkpoint ck = model->meta;
    ck.parameters = model->net.net().parameters();
    if (metadata) {
      json j;
      try {
        j = json::parse(metadata);
      } catch (const json::parse_error& e) {
        chord::fail(chord::ErrorKind::kParse, std::string("metadata: ") + e.what());
      }
      if (!j.is_object()) chord::fail(chord::ErrorKind::kType, "metadata must be a JSON object");
      ck.metadata = j.dump();
    }
    chord::save_checkpoint(path, ck);
  });
}

chord_status chord_model_load(const char* path, chord_model** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    chord::Checkpoint ck = chord::load_checkpoint(path);
    chord::TinyUNetDenoiser net = ck.make_model();
    *out = new chord_model{std::move(ck), std::move(net)};
  });
}

chord_status chord_model_info(const chord_model* model, char** out) {
  return guard([&] {
    need(model, "model");
    const chord::Checkpoint& m = model->meta;
    json j;
    j["widths"] = {m.unet.widths[0], m.unet.widths[1], m.unet.widths[2]};
    j["time_dim"] = m.unet.time_dim;
    j["parameters"] = model->net.net().parameter_count();
    j["schedule"] = {{"kind", m.schedule.kind},
                     {"steps", m.schedule.steps},
                     {"beta_start", m.schedule.beta_start},
                     {"beta_end", m.schedule.beta_end}};
    j["image"] = {m.image_width, m.image_height};
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(m.palette_hash));
    j["palette_hash"] = hash;
    j["seed"] = m.seed;
    j["metadata"] = json::parse(m.metadata);
    put(out, j.dump(2));
  });
}

void chord_model_free(chord_model* model) { delete model; }

chord_status chord_model_sample(const chord_model* model, const chord_image* floorplan,
                                const chord_palette* palette, uint64_t seed, int clip_x0,
                                chord_image** out) {
  return guard([&] {
    need(model, "model");
    need(floorplan, "floorplan");
    need(palette, "palette");
    need(out, "out");
    model->meta.require_palette(palette->palette.hash());
    check_size(model, floorplan->image, "floorplan");
    chord::Rng rng(seed);
    chord::SampleOptions opts;
    opts.clip_x0 = clip_x0 != 0;
    const chord::Tensor x = chord::sample(model->net, chord::image_to_tensor(floorplan->image),
                                          model->meta.schedule, rng, opts);
    *out = new chord_image{chord::quantize_8bit(chord::tensor_to_image(x, floorplan->image.transform))};
  });
}

chord_status chord_model_ood(const chord_model* model, const chord_image* layout,
                             const chord_image* floorplan, const chord_palette* palette,
                             uint64_t seed, int t_lo, int t_hi, int iters, double* score) {
  return guard([&] {
    need(model, "model");
    need(layout, "layout");
    need(floorplan, "floorplan");
    need(palette, "palette");
    need(score, "score");
    model->meta.require_palette(palette->palette.hash());
    check_size(model, layout->image, "layout");
    check_size(model, floorplan->image, "floorplan");
    chord::Rng rng(seed);
    *score = chord::ood_score(model->net, chord::image_to_tensor(layout->image),
                              chord::image_to_tensor(floorplan->image), model->meta.schedule, rng,
                              t_lo, t_hi, iters);
  });
}

chord_status chord_rank_sum(const double* first, size_t n_first, const double* second,
                            size_t n_second, double* u, double* z, double* p) {
  return guard([&] {
    need(first, "first");
    need(second, "second");
    const chord::RankSumResult r =
        chord::rank_sum_test({first, n_first}, {second, n_second});
    if (u) *u = r.u;
    if (z) *z = r.z;
    if (p) *p = r.p_greater;
  });
}

// ---- scene graph ----------------------------------------------------------

chord_status chord_assets_load(const char* path, chord_assets** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new chord_assets{chord::AssetDatabase::load(path)};
  });
}

chord_status chord_assets_parse(const char* text, chord_assets** out) {
  return guard([&] {
    need(text, "json");
    need(out, "out");
    *out = new chord_assets{chord::AssetDatabase::from_json(text)};
  });
}

void chord_assets_free(chord_assets* assets) { delete assets; }

chord_status chord_graph_from_scene(const chord_scene* scene, const chord_assets* assets,
                                    chord_graph** out) {
  return guard([&] {
    need(scene, "scene");
    need(assets, "assets");
    need(out, "out");
    *out = new chord_graph{chord::build_scene_graph(scene->scene, assets->db)};
  });
}

chord_status chord_graph_build(const char* detections_json, const chord_scene* scene,
                               const chord_image* floorplan, const chord_palette* palette,
                               const chord_assets* assets, chord_graph** out) {
  return guard([&] {
    need(detections_json, "detections_json");
    need(assets, "assets");
    need(out, "out");
    const std::vector<chord::Detection> dets = chord::detections_from_json(detections_json);
    std::vector<chord::RoomMask> rooms;
    std::vector<chord::Opening> openings;
    if (scene) {
      rooms = chord::segment_rooms(scene->scene);
      openings = scene->scene.openings;
    } else {
      need(floorplan, "scene or floorplan");
      need(palette, "palette");
      rooms = chord::segment_rooms(floorplan->image, palette->palette);
    }
    *out = new chord_graph{chord::build_scene_graph(dets, rooms, openings, assets->db)};
  });
}

chord_status chord_graph_generate_fine(chord_graph* graph, const chord_model* model,
                                       const chord_palette* fine_palette,
                                       const chord_assets* assets, uint64_t seed, int clip_x0) {
  return guard([&] {
    need(graph, "graph");
    need(model, "model");
    need(fine_palette, "fine_palette");
    model->meta.require_palette(fine_palette->palette.hash());
    chord::Canvas c;
    c.width = model->meta.image_width;
    c.height = model->meta.image_height;
    chord::Rng rng(seed);
    chord::SampleOptions opts;
    opts.clip_x0 = clip_x0 != 0;
    const chord::AssetDatabase* db = assets ? &assets->db : nullptr;
    auto visit = [&](std::vector<chord::ObjectNode>& list) {
      for (chord::ObjectNode& n : list) {
        if (!chord::is_fine_parent(n.box.category)) continue;
        chord::Rng local = rng.fork();
        chord::FineResult r = chord::fine_grained_generate(n, model->net, fine_palette->palette,
                                                           model->meta.schedule, local, c, db, opts);
        n.children = std::move(r.children);
        if (!r.discarded.empty()) n.flags.push_back("children_discarded");
      }
    };
    for (chord::RoomNode& r : graph->graph.rooms) visit(r.objects);
    visit(graph->graph.unassigned);
  });
}

chord_status chord_graph_parse(const char* text, chord_graph** out) {
  return guard([&] {
    need(text, "json");
    need(out, "out");
    *out = new chord_graph{chord::graph_from_json(text)};
  });
}

chord_status chord_graph_to_json(const chord_graph* graph, int indent, char** out) {
  return guard([&] {
    need(graph, "graph");
    put(out, chord::graph_to_json(graph->graph, indent));
  });
}

chord_status chord_graph_to_svg(const chord_graph* graph, const chord_palette* palette,
                                char** out) {
  return guard([&] {
    need(graph, "graph");
    need(palette, "palette");
    put(out, chord::export_svg(graph->graph, palette->palette));
  });
}

void chord_graph_counts(const chord_graph* graph, size_t* rooms, size_t* objects,
                        size_t* unassigned, size_t* openings) {
  const chord::SceneGraph empty;
  const chord::SceneGraph& g = graph ? graph->graph : empty;
  if (rooms) *rooms = g.rooms.size();
  if (objects) *objects = g.object_count();
  if (unassigned) *unassigned = g.unassigned.size();
  if (openings) *openings = g.openings.size();
}

void chord_graph_free(chord_graph* graph) { delete graph; }

}  // extern "C"
