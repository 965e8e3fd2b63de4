/* Copyright 2026 The chord-layout Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface of the layout pipeline. Objects are opaque handles created and
 * released through this API; every fallible call returns a chord_status and
 * leaves a message retrievable with chord_last_error() on the calling thread.
 * Strings handed out through `char**` parameters belong to the caller and are
 * released with chord_string_free(). Distinct handles may be used from
 * different threads concurrently; a single handle may not.
 */
#ifndef CHORD_CHORD_H_
#define CHORD_CHORD_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CHORD_API __declspec(dllexport)
#else
#define CHORD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum chord_status {
  CHORD_OK = 0,
  CHORD_E_PARSE = 1,
  CHORD_E_SCHEMA = 2,
  CHORD_E_TYPE = 3,
  CHORD_E_VALIDATION = 4,
  CHORD_E_PALETTE = 5,
  CHORD_E_TRANSFORM = 6,
  CHORD_E_PLACEMENT = 7,
  CHORD_E_TENSOR = 8,
  CHORD_E_NUMERIC = 9,
  CHORD_E_IO = 10,
  CHORD_E_ARGUMENT = 11,
  CHORD_E_INTERNAL = 100
} chord_status;

typedef struct chord_scene chord_scene;
typedef struct chord_palette chord_palette;
typedef struct chord_image chord_image;
typedef struct chord_model chord_model;
typedef struct chord_assets chord_assets;
typedef struct chord_graph chord_graph;

CHORD_API const char* chord_version(void);
/* Short machine name such as "parse_error"; "ok" for CHORD_OK. */
CHORD_API const char* chord_status_name(chord_status status);
/* Message of the last failure on this thread; "" when none. */
CHORD_API const char* chord_last_error(void);
CHORD_API void chord_string_free(char* s);

/* ---- scenes ---------------------------------------------------------- */

CHORD_API chord_status chord_scene_parse(const char* json, chord_scene** out);
CHORD_API chord_status chord_scene_load(const char* path, chord_scene** out);
CHORD_API chord_status chord_scene_to_json(const chord_scene* scene, char** out);
CHORD_API void chord_scene_free(chord_scene* scene);

/* `ok` is 1 when there are no violations; `report` is the violation list. */
CHORD_API chord_status chord_scene_validate(const chord_scene* scene, int* ok, char** report);
/* POR / PIoU and room counts of one scene as JSON. */
CHORD_API chord_status chord_scene_metrics(const chord_scene* scene, char** out);
/* Same for a bare JSON array of boxes (furniture records or detections). */
CHORD_API chord_status chord_objects_metrics(const char* objects_json, char** out);

typedef enum chord_stats_format {
  CHORD_STATS_JSON = 0,
  CHORD_STATS_TABLE = 1,
  CHORD_STATS_CATEGORY_CSV = 2,
  CHORD_STATS_ROOMS_CSV = 3
} chord_stats_format;

CHORD_API chord_status chord_corpus_stats(const chord_scene* const* scenes, size_t count,
                                          chord_stats_format format, char** out);

/* `config` is key=value text (NULL or "" for defaults). */
CHORD_API chord_status chord_toy_generate(uint64_t seed, const char* config, chord_scene** out);
/* Effective toy config after parsing `config`, as key=value text. */
CHORD_API chord_status chord_toy_config(const char* config, char** out);

/* ---- palettes -------------------------------------------------------- */

typedef enum chord_level { CHORD_LEVEL_HOUSE = 0, CHORD_LEVEL_FINE = 1 } chord_level;

CHORD_API chord_status chord_palette_default(chord_level level, chord_palette** out);
CHORD_API chord_status chord_palette_load(const char* path, chord_palette** out);
CHORD_API chord_status chord_palette_to_json(const chord_palette* palette, char** out);
CHORD_API uint64_t chord_palette_hash(const chord_palette* palette);
CHORD_API void chord_palette_free(chord_palette* palette);

/* ---- images ---------------------------------------------------------- */

typedef struct chord_canvas {
  int width;
  int height;
  int margin;
  double wall_thickness_cm;
  int antialias;
  int room_type_fill;
} chord_canvas;

CHORD_API void chord_canvas_init(chord_canvas* canvas);

typedef enum chord_raster_kind {
  CHORD_RASTER_LAYOUT = 0,
  CHORD_RASTER_FLOORPLAN = 1
} chord_raster_kind;

/* The result is quantized to 8 bits, exactly what a PNG round trip keeps. */
CHORD_API chord_status chord_rasterize(const chord_scene* scene, const chord_palette* palette,
                                       const chord_canvas* canvas, chord_raster_kind kind,
                                       chord_image** out);
CHORD_API chord_status chord_image_read_png(const char* path, chord_image** out);
CHORD_API chord_status chord_image_write_png(const chord_image* image, const char* path);
CHORD_API void chord_image_size(const chord_image* image, int* width, int* height);
/* scale, offset_x, offset_y */
CHORD_API void chord_image_transform(const chord_image* image, double out[3]);
/* JSON array of warning strings. */
CHORD_API chord_status chord_image_warnings(const chord_image* image, char** out);
CHORD_API void chord_image_free(chord_image* image);

/* ---- perception ------------------------------------------------------ */

CHORD_API chord_status chord_detect(const chord_image* layout, const chord_palette* palette,
                                    char** detections_json);

/* ---- diffusion ------------------------------------------------------- */

typedef struct chord_model_config {
  int widths[3];
  int time_dim;
  int steps;
  double beta_start;
  double beta_end;
  int height;
  int width;
} chord_model_config;

CHORD_API void chord_model_config_init(chord_model_config* config);

typedef struct chord_train_config {
  double learning_rate;
  double decay_factor;
  const int* milestones;
  size_t milestone_count;
  int batch_size;
  int epochs;
  int max_steps;
  uint64_t seed;
  int threads;
  double grad_clip;
} chord_train_config;

CHORD_API void chord_train_config_init(chord_train_config* config);

typedef void (*chord_epoch_callback)(int epoch, double mean_loss, void* user);

/* The model is bound to `palette` (its hash is checked on sample / ood). */
CHORD_API chord_status chord_model_create(const chord_model_config* config, uint64_t seed,
                                          const chord_palette* palette, chord_model** out);
/* Trains on layout / floorplan pairs rasterized from `scenes` with the
 * model's image size. `loss_csv` (optional) receives "epoch,mean_loss". */
CHORD_API chord_status chord_model_train(chord_model* model, const chord_scene* const* scenes,
                                         size_t count, const chord_palette* palette,
                                         const chord_canvas* canvas,
                                         const chord_train_config* config,
                                         chord_epoch_callback on_epoch, void* user,
                                         char** loss_csv);
/* `metadata` is a JSON object stored in the checkpoint header (may be NULL). */
CHORD_API chord_status chord_model_save(const chord_model* model, const char* path,
                                        const char* metadata);
CHORD_API chord_status chord_model_load(const char* path, chord_model** out);
/* Architecture, schedule, image size, palette hash and metadata as JSON. */
CHORD_API chord_status chord_model_info(const chord_model* model, char** out);
CHORD_API void chord_model_free(chord_model* model);

CHORD_API chord_status chord_model_sample(const chord_model* model, const chord_image* floorplan,
                                          const chord_palette* palette, uint64_t seed,
                                          int clip_x0, chord_image** out);
CHORD_API chord_status chord_model_ood(const chord_model* model, const chord_image* layout,
                                       const chord_image* floorplan,
                                       const chord_palette* palette, uint64_t seed, int t_lo,
                                       int t_hi, int iters, double* score);

/* One-sided Wilcoxon rank-sum test that `first` tends to be larger. */
CHORD_API chord_status chord_rank_sum(const double* first, size_t n_first, const double* second,
                                      size_t n_second, double* u, double* z, double* p);

/* ---- scene graph ----------------------------------------------------- */

CHORD_API chord_status chord_assets_load(const char* path, chord_assets** out);
CHORD_API chord_status chord_assets_parse(const char* json, chord_assets** out);
CHORD_API void chord_assets_free(chord_assets* assets);

/* Furniture of `scene` as the object list, its rooms and openings. */
CHORD_API chord_status chord_graph_from_scene(const chord_scene* scene, const chord_assets* assets,
                                              chord_graph** out);
/* Detections with rooms and openings from `scene` when given, otherwise with
 * rooms segmented from `floorplan` (one of the two is required). */
CHORD_API chord_status chord_graph_build(const char* detections_json, const chord_scene* scene,
                                         const chord_image* floorplan,
                                         const chord_palette* palette,
                                         const chord_assets* assets, chord_graph** out);
/* Samples children for every object that takes them. `assets` may be NULL. */
CHORD_API chord_status chord_graph_generate_fine(chord_graph* graph, const chord_model* model,
                                                 const chord_palette* fine_palette,
                                                 const chord_assets* assets, uint64_t seed,
                                                 int clip_x0);
CHORD_API chord_status chord_graph_parse(const char* json, chord_graph** out);
/* indent < 0 gives compact output. */
CHORD_API chord_status chord_graph_to_json(const chord_graph* graph, int indent, char** out);
CHORD_API chord_status chord_graph_to_svg(const chord_graph* graph, const chord_palette* palette,
                                          char** out);
CHORD_API void chord_graph_counts(const chord_graph* graph, size_t* rooms, size_t* objects,
                                  size_t* unassigned, size_t* openings);
CHORD_API void chord_graph_free(chord_graph* graph);

#ifdef __cplusplus
}
#endif

#endif /* CHORD_CHORD_H_ */
