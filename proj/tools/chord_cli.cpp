// Copyright 2026 The chord-layout Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Talks to the library only through chord.h.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "chord/chord.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Plumbing
// ---------------------------------------------------------------------------

struct Failure {
  chord_status status;
  std::string message;
};

void check(chord_status s) {
  if (s != CHORD_OK) throw Failure{s, chord_last_error()};
}

[[noreturn]] void usage(const std::string& message) {
  throw Failure{CHORD_E_ARGUMENT, message};
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Scene = std::unique_ptr<chord_scene, Deleter<chord_scene, chord_scene_free>>;
using PaletteH = std::unique_ptr<chord_palette, Deleter<chord_palette, chord_palette_free>>;
using Image = std::unique_ptr<chord_image, Deleter<chord_image, chord_image_free>>;
using Model = std::unique_ptr<chord_model, Deleter<chord_model, chord_model_free>>;
using Assets = std::unique_ptr<chord_assets, Deleter<chord_assets, chord_assets_free>>;
using Graph = std::unique_ptr<chord_graph, Deleter<chord_graph, chord_graph_free>>;

std::string take(char* s) {
  std::string out = s ? s : "";
  chord_string_free(s);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{CHORD_E_IO, "cannot open '" + path + "'"};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& data) {
  if (path == "-") {
    std::cout << data;
    std::cout.flush();
    return;
  }
  if (fs::path p(path); p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{CHORD_E_IO, "cannot write '" + path + "'"};
  out << data;
  std::cerr << "wrote " << path << "\n";
}

void log(const std::string& line) { std::cerr << line << "\n"; }

// Runs fn(i) for i in [0, n) on up to `threads` workers; fn fills slot i, so
// results keep input order.
template <class F>
void parallel_for(size_t n, int threads, F fn) {
  const size_t workers = std::max<size_t>(1, std::min<size_t>(n, static_cast<size_t>(std::max(1, threads))));
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Scene files given directly or found (sorted, *.json) in directories.
std::vector<std::string> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<std::string> out;
  for (const std::string& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<std::string> found;
      for (const auto& e : fs::recursive_directory_iterator(in)) {
        if (e.is_regular_file() && e.path().extension() == ".json") found.push_back(e.path().string());
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(in);
    }
  }
  return out;
}

Scene load_scene(const std::string& path) {
  chord_scene* s = nullptr;
  check(chord_scene_load(path.c_str(), &s));
  return Scene(s);
}

Image load_png(const std::string& path) {
  chord_image* img = nullptr;
  check(chord_image_read_png(path.c_str(), &img));
  return Image(img);
}

Model load_model(const std::string& path) {
  chord_model* m = nullptr;
  check(chord_model_load(path.c_str(), &m));
  return Model(m);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      usage("not a number: '" + item + "'");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Shared settings
// ---------------------------------------------------------------------------

struct Global {
  uint64_t seed = 0;
  int threads = 1;
  bool print_config = false;
};

struct PaletteOpts {
  std::string path;
  std::string level = "house";

  void add(CLI::App* app) {
    app->add_option("--palette", path, "Palette JSON (default: built-in)");
    app->add_option("--level", level, "Built-in palette level")
        ->check(CLI::IsMember({"house", "fine"}))
        ->capture_default_str();
  }
  PaletteH load() const {
    chord_palette* p = nullptr;
    if (!path.empty()) check(chord_palette_load(path.c_str(), &p));
    else check(chord_palette_default(level == "fine" ? CHORD_LEVEL_FINE : CHORD_LEVEL_HOUSE, &p));
    return PaletteH(p);
  }
};

struct CanvasOpts {
  chord_canvas c{};
  bool antialias = false;
  bool room_fill = false;

  CanvasOpts() { chord_canvas_init(&c); }
  void add(CLI::App* app) {
    app->add_option("--width", c.width, "Image width in pixels")->capture_default_str();
    app->add_option("--height", c.height, "Image height in pixels")->capture_default_str();
    app->add_option("--margin", c.margin, "Margin in pixels")->capture_default_str();
    app->add_option("--wall-thickness", c.wall_thickness_cm, "Wall thickness in cm")->capture_default_str();
    app->add_flag("--antialias", antialias, "Supersampled display render");
    app->add_flag("--room-fill", room_fill, "Gray room-type fill in the floor plan");
  }
  const chord_canvas* get() {
    c.antialias = antialias ? 1 : 0;
    c.room_type_fill = room_fill ? 1 : 0;
    return &c;
  }
};

json meta_for(const CLI::App* sub, const Global& g) {
  json options = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name =
        opt->get_lnames().empty() ? opt->get_single_name() : opt->get_lnames().front();
    if (name.empty()) continue;
    if (name == "help") continue;
    if (opt->count() == 0) {
      options[name] = opt->get_default_str();
    } else {
      std::string joined;
      for (const std::string& r : opt->results()) joined += (joined.empty() ? "" : ",") + r;
      options[name] = joined;
    }
  }
  return {{"tool", "chord"},
          {"version", chord_version()},
          {"command", sub->get_name()},
          {"seed", g.seed},
          {"config", options}};
}

std::string derive(const std::string& prefix, const std::string& suffix) {
  if (prefix == "-") usage("this command writes several files; give -o PREFIX");
  return prefix + suffix;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

struct ValidateCmd {
  std::vector<std::string> inputs;
  std::string out = "-";
  bool strict = false;

  void add(CLI::App& app) {
    CLI::App* c = app.add_subcommand("validate", "Check scene JSON files");
    c->add_option("inputs", inputs, "Scene files or directories")->required()->check(CLI::ExistingPath);
    c->add_option("-o,--output", out, "Report path ('-' for stdout)")->capture_default_str();
    c->add_flag("--strict", strict, "Exit with status 3 when any scene has violations");
    sub = c;
  }
  int run(const Global& g) {
    const std::vector<std::string> files = expand_inputs(inputs);
    std::vector<json> results(files.size());
    parallel_for(files.size(), g.threads, [&](size_t i) {
      json r{{"path", files[i]}};
      chord_scene* s = nullptr;
      if (const chord_status st = chord_scene_load(files[i].c_str(), &s); st != CHORD_OK) {
        r["ok"] = false;
        r["error"] = chord_last_error();
        r["status"] = static_cast<int>(st);
      } else {
        Scene scene(s);
        int ok = 0;
        char* report = nullptr;
        check(chord_scene_validate(scene.get(), &ok, &report));
        r["ok"] = ok != 0;
        r["report"] = json::parse(take(report));
      }
      results[i] = std::move(r);
    });
    size_t bad = 0;
    const json* unreadable = nullptr;
    for (const json& r : results) {
      bad += r["ok"].get<bool>() ? 0 : 1;
      if (!unreadable && r.contains("error")) unreadable = &r;
    }
    json doc{{"meta", meta_for(sub, g)}, {"results", results}, {"invalid", bad}};
    write_output(out, doc.dump(2) + "\n");
    log(std::to_string(files.size() - bad) + "/" + std::to_string(files.size()) + " scenes valid");
    // Files that do not load at all are a failure whether or not --strict is set.
    if (unreadable) throw Failure{static_cast<chord_status>((*unreadable)["status"].get<int>()),
                                  (*unreadable)["error"].get<std::string>()};
    return strict && bad ? 3 : 0;
  }
  CLI::App* sub = nullptr;
};

struct StatsCmd {
  std::vector<std::string> inputs;
  std::string out = "-";
  std::string format = "json";

  void add(CLI::App& app) {
    CLI::App* c = app.add_subcommand("stats", "Corpus statistics (POR, PIoU, rooms, categories)");
    c->add_option("inputs", inputs, "Scene files or directories")->required()->check(CLI::ExistingPath);
    c->add_option("-o,--output", out, "Output path ('-' for stdout)")->capture_default_str();
    c->add_option("--format", format, "json, table, categories-csv or rooms-csv")
        ->check(CLI::IsMember({"json", "table", "categories-csv", "rooms-csv"}))
        ->capture_default_str();
    sub = c;
  }
  int run(const Global& g) {
    const std::vector<std::string> files = expand_inputs(inputs);
    std::vector<Scene> scenes(files.size());
    parallel_for(files.size(), g.threads, [&](size_t i) { scenes[i] = load_scene(files[i]); });
    std::vector<const chord_scene*> ptrs;
    for (const Scene& s : scenes) ptrs.push_back(s.get());
    chord_stats_format f = CHORD_STATS_JSON;
    if (format == "table") f = CHORD_STATS_TABLE;
    if (format == "categories-csv") f = CHORD_STATS_CATEGORY_CSV;
    if (format == "rooms-csv") f = CHORD_STATS_ROOMS_CSV;
    char* text = nullptr;
    check(chord_corpus_stats(ptrs.data(), ptrs.size(), f, &text));
    std::string body = take(text);
    if (f == CHORD_STATS_JSON) {
      json doc = json::parse(body);
      doc["meta"] = meta_for(sub, g);
      body = doc.dump(2) + "\n";
    }
    write_output(out, body);
    return 0;
  }
  CLI::App* sub = nullptr;
};

struct RasterizeCmd {
  std::string input;
  std::string out;
  PaletteOpts palette;
  CanvasOpts canvas;

  void add(CLI::App& app) {
    CLI::App* c = app.add_subcommand("rasterize", "Scene -> layout PNG and floor-plan PNG");
    c->add_option("scene", input, "Scene JSON")->required()->check(CLI::ExistingFile);
    c->add_option("-o,--output", out, "Output prefix (default: scene path without extension)");
    palette.add(c);
    canvas.add(c);
    sub = c;
  }
  int run(const Global&) {
    const std::string prefix = out.empty() ? (fs::path(input).parent_path() / fs::path(input).stem()).string() : out;
    Scene scene = load_scene(input);
    PaletteH pal = palette.load();
    for (auto [kind, suffix] : {std::pair{CHORD_RASTER_LAYOUT, "_layout.png"},
                                std::pair{CHORD_RASTER_FLOORPLAN, "_floorplan.png"}}) {
      chord_image* img = nullptr;
      check(chord_rasterize(scene.get(), pal.get(), canvas.get(), kind, &img));
      Image keep(img);
      const std::string path = derive(prefix, suffix);
      check(chord_image_write_png(img, path.c_str()));
      log("wrote " + path);
      char* w = nullptr;
      check(chord_image_warnings(img, &w));
      for (const auto& msg : json::parse(take(w))) log("warning: " + msg.get<std::string>());
    }
    return 0;
  }
  CLI::App* sub = nullptr;
};

struct GenToyCmd {
  int count = 1;
  std::string mode = "forbid";
  std::string toy_config;
  std::string out = "toy";

  void add(CLI::App& app) {
    CLI::App* c = app.add_subcommand("gen-toy", "Generate synthetic scenes");
    c->add_option("-n,--count", count, "Number of scenes (seeds seed .. seed+n-1)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c->add_option("--mode", mode, "Collision mode")
        ->check(CLI::IsMember({"forbid", "force"}))
        ->capture_default_str();
    c->add_option("--toy-config", toy_config, "key=value toy generator config")->check(CLI::ExistingFile);
    c->add_option("-o,--output", out, "Output directory, or '-' for one scene on stdout")->capture_default_str();
    sub = c;
  }
  std::string config_text() const {
    std::string text = toy_config.empty() ? "" : read_file(toy_config);
    return text + "\ncollision_mode=" + mode + "\n";
  }
  int run(const Global& g) {
    if (out == "-" && count != 1) usage("'-o -' takes a single scene (--count 1)");
    const std::string cfg = config_text();
    const json meta = meta_for(sub, g);
    std::vector<std::string> texts(count);
    parallel_for(static_cast<size_t>(count), g.threads, [&](size_t i) {
      chord_scene* s = nullptr;
      check(chord_toy_generate(g.seed + i, cfg.c_str(), &s));
      Scene scene(s);
      char* text = nullptr;
      check(chord_scene_to_json(scene.get(), &text));
      json doc = json::parse(take(text));
      json m = meta;
      m["seed"] = g.seed + i;
      doc["meta"] = m;
      texts[i] = doc.dump(2) + "\n";
    });
    if (out == "-") {
      write_output("-", texts[0]);
      return 0;
    }
    for (int i = 0; i < count; ++i) {
      write_output((fs::path(out) / ("toy_" + std::to_string(g.seed + i) + ".json")).string(), texts[i]);
    }
    return 0;
  }
  CLI::App* sub = nullptr;
};

struct ModelOpts {
  int steps = 1000;
  double beta_start = 1e-4;
  double beta_end = 0.02;
  std::string widths = "16,32,64";
  int time_dim = 32;

  void add(CLI::App* c) {
    c->add_option("--steps", steps, "Diffusion steps T")->capture_default_str();
    c->add_option("--beta-start", beta_start, "First beta")->capture_default_str();
    c->add_option("--beta-end", beta_end, "Last beta")->capture_default_str();
    c->add_option("--widths", widths, "U-Net channel widths a,b,c")->capture_default_str();
    c->add_option("--time-dim", time_dim, "Timestep embedding size")->capture_default_str();
  }
};

struct TrainCmd {
  std::vector<std::string> inputs;
  int toy = 0;
  std::string toy_config;
  std::string out = "model.ckpt";
  std::string loss_csv = "loss.csv";
  std::string resume;
  ModelOpts model;
  PaletteOpts palette;
  CanvasOpts canvas;
  double lr = 1e-4;
  double decay = 0.1;
  std::string milestones;
  int batch = 4;
  int epochs = 10;
  int max_steps = 0;
  double grad_clip = 1.0;

  void add(CLI::App& app) {
    CLI::App* c = app.add_subcommand("train", "Train the layout denoiser");
    c->add_option("inputs", inputs, "Scene files or directories")->check(CLI::ExistingPath);
    c->add_option("--toy", toy, "Add N generated forbid-mode toy scenes (seeds from --seed)");
    c->add_option("--toy-config", toy_config, "Toy generator config")->check(CLI::ExistingFile);
    c->add_option("-o,--output", out, "Checkpoint path")->capture_default_str();
    c->add_option("--loss-csv", loss_csv, "Per-epoch loss CSV ('' to skip)")->capture_default_str();
    c->add_option("--resume", resume, "Continue from a checkpoint")->check(CLI::ExistingFile);
    model.add(c);
    palette.add(c);
    canvas.add(c);
    c->add_option("--lr", lr, "Adam learning rate")->capture_default_str();
    c->add_option("--decay", decay, "Rate multiplier at each milestone")->capture_default_str();
    c->add_option("--milestones", milestones, "Epochs at which the rate decays, a,b,...");
    c->add_option("--batch", batch, "Batch size")->capture_default_str();
    c->add_option("--epochs", epochs, "Epochs")->capture_default_str();
    c->add_option("--max-steps", max_steps, "Stop after this many steps (0: no cap)")->capture_default_str();
    c->add_option("--grad-clip", grad_clip, "Gradient norm cap (0: off)")->capture_default_str();
    sub = c;
  }
  int run(const Global& g) {
    const std::vector<std::string> files = expand_inputs(inputs);
    std::vector<Scene> scenes(files.size());
    parallel_for(files.size(), g.threads, [&](size_t i) { scenes[i] = load_scene(files[i]); });
    const std::string cfg = (toy_config.empty() ? "" : read_file(toy_config)) + "\ncollision_mode=forbid\n";
    for (int i = 0, made = 0; made < toy; ++i) {
      if (i > 20 * toy + 100) usage("toy generator keeps failing; check --toy-config");
      chord_scene* s = nullptr;
      // Infeasible draws are skipped, so seeds advance until enough scenes exist.
      const chord_status st = chord_toy_generate(g.seed + i, cfg.c_str(), &s);
      if (st == CHORD_E_PLACEMENT) continue;
      check(st);
      scenes.emplace_back(s);
      ++made;
    }
    if (scenes.empty()) usage("no training scenes; pass files or --toy N");

    PaletteH pal = palette.load();
    Model m;
    if (!resume.empty()) {
      m = load_model(resume);
    } else {
      const std::vector<double> w = parse_list(model.widths);
      if (w.size() != 3) usage("--widths needs three values");
      chord_model_config mc;
      chord_model_config_init(&mc);
      for (int i = 0; i < 3; ++i) mc.widths[i] = static_cast<int>(w[i]);
      mc.time_dim = model.time_dim;
      mc.steps = model.steps;
      mc.beta_start = model.beta_start;
      mc.beta_end = model.beta_end;
      mc.width = canvas.c.width;
      mc.height = canvas.c.height;
      chord_model* raw = nullptr;
      check(chord_model_create(&mc, g.seed, pal.get(), &raw));
      m.reset(raw);
    }
    std::vector<int> ms;
    for (double v : parse_list(milestones)) ms.push_back(static_cast<int>(v));
    chord_train_config tc;
    chord_train_config_init(&tc);
    tc.learning_rate = lr;
    tc.decay_factor = decay;
    tc.milestones = ms.data();
    tc.milestone_count = ms.size();
    tc.batch_size = batch;
    tc.epochs = epochs;
    tc.max_steps = max_steps;
    tc.seed = g.seed;
    tc.threads = g.threads;
    tc.grad_clip = grad_clip;
    std::vector<const chord_scene*> ptrs;
    for (const Scene& s : scenes) ptrs.push_back(s.get());
    log("training on " + std::to_string(ptrs.size()) + " scenes");
    char* csv = nullptr;
    check(chord_model_train(m.get(), ptrs.data(), ptrs.size(), pal.get(), canvas.get(), &tc,
                            [](int e, double l, void*) {
                              char buf[64];
                              std::snprintf(buf, sizeof buf, "epoch %d mean_loss %.6g", e, l);
                              log(buf);
                            },
                            nullptr, &csv));
    const std::string loss = take(csv);
    const std::string meta = meta_for(sub, g).dump();
    if (out == "-") usage("checkpoints are binary; give a file path");
    check(chord_model_save(m.get(), out.c_str(), meta.c_str()));
    log("wrote " + out);
    if (!loss_csv.empty()) write_output(loss_csv, loss);
    return 0;
  }
  CLI::App* sub = nullptr;
};

struct SampleCmd {
  std::string model_path;
  std::string floorplan;
  std::string out = "sample.png";
  PaletteOpts palette;
  bool clip = false;

  void add(CLI::App& app) {
    CLI::App* c = app.add_subcommand("sample", "Checkpoint + floor-plan PNG -> layout PNG");
    c->add_option("-m,--model", model_path, "Checkpoint")->required()->check(CLI::ExistingFile);
    c->add_option("floorplan", floorplan, "Floor-plan PNG")->required()->check(CLI::ExistingFile);
    c->add_option("-o,--output", out, "Layout PNG")->capture_default_str();
    c->add_flag("--clip-x0", clip, "Clamp the x0 estimate at every step");
    palette.add(c);
    sub = c;
  }
  int run(const Global& g) {
    Model m = load_model(model_path);
    Image cond = load_png(floorplan);
    PaletteH pal = palette.load();
    chord_image* img = nullptr;
    check(chord_model_sample(m.get(), cond.get(), pal.get(), g.seed, clip ? 1 : 0, &img));
    Image keep(img);
    if (out == "-") usage("PNG output needs a file path");
    check(chord_image_write_png(img, out.c_str()));
    log("wrote " + out);
    return 0;
  }
  CLI::App* sub = nullptr;
};

struct DetectCmd {
  std::string input;
  std::string out = "detections.json";
  PaletteOpts palette;

  void add(CLI::App& app) {
    CLI::App* c = app.add_subcommand("detect", "Layout PNG -> detections JSON");
    c->add_option("layout", input, "Layout PNG")->required()->check(CLI::ExistingFile);
    c->add_option("-o,--output", out, "Detections JSON ('-' for stdout)")->capture_default_str();
    palette.add(c);
    sub = c;
  }
  int run(const Global& g) {
    Image img = load_png(input);
    PaletteH pal = palette.load();
    char* dets = nullptr;
    check(chord_detect(img.get(), pal.get(), &dets));
    json doc{{"meta", meta_for(sub, g)}, {"furniture", json::parse(take(dets))}};
    write_output(out, doc.dump(2) + "\n");
    log(std::to_string(doc["furniture"].size()) + " objects");
    return 0;
  }
  CLI::App* sub = nullptr;
};

std::string svg_with_meta(std::string svg, const json& meta) {
  const std::string comment = "<!-- " + meta.dump() + " -->\n";
  const size_t at = svg.find("?>\n");
  svg.insert(at == std::string::npos ? 0 : at + 3, comment);
  return svg;
}

struct GraphOut {
  std::string out = "graph.json";
  std::string svg;

  void add(CLI::App* c) {
    c->add_option("-o,--output", out, "Scene-graph JSON ('-' for stdout)")->capture_default_str();
    c->add_option("--svg", svg, "Also write an SVG render here");
  }
  void write(const chord_graph* g, const chord_palette* pal, const json& meta) const {
    char* text = nullptr;
    check(chord_graph_to_json(g, 2, &text));
    json doc = json::parse(take(text));
    doc["meta"] = meta;
    write_output(out, doc.dump(2) + "\n");
    if (!svg.empty()) {
      char* s = nullptr;
      check(chord_graph_to_svg(g, pal, &s));
      write_output(svg, svg_with_meta(take(s), meta));
    }
    size_t rooms = 0, objects = 0, unassigned = 0, openings = 0;
    chord_graph_counts(g, &rooms, &objects, &unassigned, &openings);
    log(std::to_string(rooms) + " rooms, " + std::to_string(objects) + " objects (" +
        std::to_string(unassigned) + " unassigned), " + std::to_string(openings) + " openings");
  }
};

Assets load_assets(const std::string& path) {
  chord_assets* a = nullptr;
  if (path.empty()) check(chord_assets_parse("[]", &a));
  else check(chord_assets_load(path.c_str(), &a));
  return Assets(a);
}

struct GraphCmd {
  std::string detections;
  std::string scene;
  std::string floorplan;
  std::string assets;
  PaletteOpts palette;
  GraphOut output;

  void add(CLI::App& app) {
    CLI::App* c = app.add_subcommand("graph", "Detections + scene -> scene-graph JSON and SVG");
    c->add_option("-d,--detections", detections, "Detections JSON (default: the scene's furniture)")
        ->check(CLI::ExistingFile);
    c->add_option("-s,--scene", scene, "Scene JSON giving rooms and openings")->check(CLI::ExistingFile);
    c->add_option("-f,--floorplan", floorplan, "Floor-plan PNG to segment rooms from")->check(CLI::ExistingFile);
    c->add_option("-a,--assets", assets, "Asset database JSON")->check(CLI::ExistingFile);
    palette.add(c);
    output.add(c);
    sub = c;
  }
  int run(const Global& g) {
    Assets db = load_assets(assets);
    PaletteH pal = palette.load();
    Scene s;
    if (!scene.empty()) s = load_scene(scene);
    chord_graph* raw = nullptr;
    if (detections.empty()) {
      if (!s) usage("graph needs --detections or --scene");
      check(chord_graph_from_scene(s.get(), db.get(), &raw));
    } else {
      Image fp;
      if (!s) {
        if (floorplan.empty()) usage("graph needs --scene or --floorplan for rooms");
        fp = load_png(floorplan);
      }
      check(chord_graph_build(read_file(detections).c_str(), s.get(), fp.get(), pal.get(), db.get(), &raw));
    }
    Graph graph(raw);
    output.write(graph.get(), pal.get(), meta_for(sub, g));
    return 0;
  }
  CLI::App* sub = nullptr;
};

struct MetricsCmd {
  std::vector<std::string> inputs;
  std::string out = "-";

  void add(CLI::App& app) {
    CLI::App* c = app.add_subcommand("metrics", "POR / PIoU of scenes or detection lists");
    c->add_option("inputs", inputs, "Scene or detections JSON files, or directories")
        ->required()
        ->check(CLI::ExistingPath);
    c->add_option("-o,--output", out, "Report path ('-' for stdout)")->capture_default_str();
    sub = c;
  }
  int run(const Global& g) {
    const std::vector<std::string> files = expand_inputs(inputs);
    std::vector<json> results(files.size());
    parallel_for(files.size(), g.threads, [&](size_t i) {
      const std::string text = read_file(files[i]);
      const json doc = json::parse(text, nullptr, false);
      char* m = nullptr;
      json r{{"path", files[i]}};
      if (doc.is_object() && doc.contains("rooms")) {
        chord_scene* s = nullptr;
        check(chord_scene_parse(text.c_str(), &s));
        Scene scene(s);
        check(chord_scene_metrics(scene.get(), &m));
        r["kind"] = "scene";
      } else {
        check(chord_objects_metrics(text.c_str(), &m));
        r["kind"] = "objects";
      }
      r["metrics"] = json::parse(take(m));
      results[i] = std::move(r);
    });
    json doc{{"meta", meta_for(sub, g)}, {"results", results}};
    write_output(out, doc.dump(2) + "\n");
    return 0;
  }
  CLI::App* sub = nullptr;
};

json model_info(const chord_model* m) {
  char* info = nullptr;
  check(chord_model_info(m, &info));
  return json::parse(take(info));
}

struct OodCmd {
  std::string model_path;
  std::vector<std::string> layouts;
  std::vector<std::string> floorplans;
  std::string out = "-";
  PaletteOpts palette;
  int t_lo = -1;
  int t_hi = -1;
  int iters = 100;

  void add(CLI::App& app) {
    CLI::App* c = app.add_subcommand("ood", "Noise-prediction error of layouts (collision-as-OOD score)");
    c->add_option("-m,--model", model_path, "Checkpoint")->required()->check(CLI::ExistingFile);
    c->add_option("-l,--layout", layouts, "Layout PNG(s)")->required()->check(CLI::ExistingFile);
    c->add_option("-f,--floorplan", floorplans, "Matching floor-plan PNG(s)")->required()->check(CLI::ExistingFile);
    c->add_option("-o,--output", out, "Report path ('-' for stdout)")->capture_default_str();
    c->add_option("--t-lo", t_lo, "Lowest timestep (default 0.9 T)");
    c->add_option("--t-hi", t_hi, "Highest timestep (default T)");
    c->add_option("--iters", iters, "Draws per layout")->capture_default_str();
    palette.add(c);
    sub = c;
  }
  int run(const Global& g) {
    if (layouts.size() != floorplans.size()) usage("give one --floorplan per --layout");
    Model m = load_model(model_path);
    const int steps = model_info(m.get())["schedule"]["steps"].get<int>();
    const int lo = t_lo > 0 ? t_lo : static_cast<int>(std::lround(0.9 * steps));
    const int hi = t_hi > 0 ? t_hi : steps;
    PaletteH pal = palette.load();
    std::vector<double> scores(layouts.size());
    parallel_for(layouts.size(), g.threads, [&](size_t i) {
      Image l = load_png(layouts[i]);
      Image f = load_png(floorplans[i]);
      check(chord_model_ood(m.get(), l.get(), f.get(), pal.get(), g.seed, lo, hi, iters, &scores[i]));
    });
    json rows = json::array();
    double mean = 0.0;
    for (size_t i = 0; i < scores.size(); ++i) {
      rows.push_back({{"layout", layouts[i]}, {"floorplan", floorplans[i]}, {"score", scores[i]}});
      mean += scores[i] / static_cast<double>(scores.size());
    }
    json doc{{"meta", meta_for(sub, g)}, {"t_lo", lo}, {"t_hi", hi}, {"iters", iters},
             {"scores", rows}, {"mean", mean}};
    write_output(out, doc.dump(2) + "\n");
    return 0;
  }
  CLI::App* sub = nullptr;
};

struct PipelineCmd {
  std::string model_path;
  std::string fine_model;
  std::string scene;
  std::string floorplan;
  std::string assets;
  std::string out = "pipeline";
  PaletteOpts palette;
  std::string fine_palette;
  CanvasOpts canvas;
  bool clip = false;

  void add(CLI::App& app) {
    CLI::App* c = app.add_subcommand("pipeline", "Floor plan -> sample -> detect -> graph -> SVG");
    c->add_option("-m,--model", model_path, "House-level checkpoint")->required()->check(CLI::ExistingFile);
    c->add_option("--fine-model", fine_model, "Fine-level checkpoint for tabletop items")->check(CLI::ExistingFile);
    c->add_option("--fine-palette", fine_palette, "Fine palette JSON (default: built-in)")->check(CLI::ExistingFile);
    c->add_option("-s,--scene", scene, "Scene JSON providing the floor plan, rooms and openings")->check(CLI::ExistingFile);
    c->add_option("-f,--floorplan", floorplan, "Floor-plan PNG (rooms are segmented from it)")->check(CLI::ExistingFile);
    c->add_option("-a,--assets", assets, "Asset database JSON")->check(CLI::ExistingFile);
    c->add_option("-o,--output", out, "Output prefix")->capture_default_str();
    c->add_flag("--clip-x0", clip, "Clamp the x0 estimate at every step");
    palette.add(c);
    canvas.add(c);
    sub = c;
  }
  int run(const Global& g) {
    if (scene.empty() == floorplan.empty()) usage("pipeline needs exactly one of --scene or --floorplan");
    Model m = load_model(model_path);
    const json info = model_info(m.get());
    PaletteH pal = palette.load();
    Scene s;
    Image cond;
    if (!scene.empty()) {
      s = load_scene(scene);
      canvas.c.width = info["image"][0].get<int>();
      canvas.c.height = info["image"][1].get<int>();
      chord_image* img = nullptr;
      check(chord_rasterize(s.get(), pal.get(), canvas.get(), CHORD_RASTER_FLOORPLAN, &img));
      cond.reset(img);
      const std::string fp = derive(out, "_floorplan.png");
      check(chord_image_write_png(img, fp.c_str()));
      log("wrote " + fp);
    } else {
      cond = load_png(floorplan);
    }
    chord_image* sampled = nullptr;
    check(chord_model_sample(m.get(), cond.get(), pal.get(), g.seed, clip ? 1 : 0, &sampled));
    Image layout(sampled);
    const std::string layout_path = derive(out, "_layout.png");
    check(chord_image_write_png(sampled, layout_path.c_str()));
    log("wrote " + layout_path);

    char* dets = nullptr;
    check(chord_detect(sampled, pal.get(), &dets));
    const std::string det_text = take(dets);
    const json meta = meta_for(sub, g);
    write_output(derive(out, "_detections.json"),
                 json{{"meta", meta}, {"furniture", json::parse(det_text)}}.dump(2) + "\n");

    Assets db = load_assets(assets);
    chord_graph* raw = nullptr;
    check(chord_graph_build(det_text.c_str(), s.get(), cond.get(), pal.get(), db.get(), &raw));
    Graph graph(raw);
    if (!fine_model.empty()) {
      Model fm = load_model(fine_model);
      chord_palette* fp = nullptr;
      if (fine_palette.empty()) check(chord_palette_default(CHORD_LEVEL_FINE, &fp));
      else check(chord_palette_load(fine_palette.c_str(), &fp));
      PaletteH fpal(fp);
      check(chord_graph_generate_fine(graph.get(), fm.get(), fpal.get(), db.get(), g.seed, clip ? 1 : 0));
    }
    GraphOut o;
    o.out = derive(out, "_graph.json");
    o.svg = derive(out, ".svg");
    o.write(graph.get(), pal.get(), meta);
    return 0;
  }
  CLI::App* sub = nullptr;
};

void print_failure(const Failure& f) {
  json err{{"error", {{"code", chord_status_name(f.status)}, {"status", static_cast<int>(f.status)},
                      {"message", f.message}}}};
  std::cerr << err.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Layout pipeline: rasterize, train, sample, detect and assemble scene graphs"};
  app.set_version_flag("--version", std::string("chord ") + chord_version());
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--seed", g.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.set_config("--config", "", "TOML/INI config; flags given on the command line win")
      ->envname("CHORD_CONFIG");
  app.add_flag("--print-config", g.print_config, "Print the effective configuration and exit");

  ValidateCmd validate;
  StatsCmd stats;
  RasterizeCmd rasterize;
  GenToyCmd gen_toy;
  TrainCmd train;
  SampleCmd sample;
  DetectCmd detect;
  GraphCmd graph;
  MetricsCmd metrics;
  OodCmd ood;
  PipelineCmd pipeline;
  validate.add(app);
  stats.add(app);
  rasterize.add(app);
  gen_toy.add(app);
  train.add(app);
  sample.add(app);
  detect.add(app);
  graph.add(app);
  metrics.add(app);
  ood.add(app);
  pipeline.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << json{{"error", {{"code", "usage_error"}, {"status", e.get_exit_code()},
                                 {"message", e.what()}}}}.dump()
              << "\n";
    return 2;
  }

  if (g.print_config) {
    std::cout << app.config_to_str(true, true);
    return 0;
  }

  try {
    if (validate.sub->parsed()) return validate.run(g);
    if (stats.sub->parsed()) return stats.run(g);
    if (rasterize.sub->parsed()) return rasterize.run(g);
    if (gen_toy.sub->parsed()) return gen_toy.run(g);
    if (train.sub->parsed()) return train.run(g);
    if (sample.sub->parsed()) return sample.run(g);
    if (detect.sub->parsed()) return detect.run(g);
    if (graph.sub->parsed()) return graph.run(g);
    if (metrics.sub->parsed()) return metrics.run(g);
    if (ood.sub->parsed()) return ood.run(g);
    if (pipeline.sub->parsed()) return pipeline.run(g);
  } catch (const Failure& f) {
    print_failure(f);
    return 1;
  } catch (const json::exception& e) {
    print_failure({CHORD_E_PARSE, e.what()});
    return 1;
  } catch (const std::exception& e) {
    print_failure({CHORD_E_INTERNAL, e.what()});
    return 1;
  }
  return 0;
}
