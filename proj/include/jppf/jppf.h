// Copyright 2026 The JPPF Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef JPPF_JPPF_H_
#define JPPF_JPPF_H_

/*
 * C interface of the panoptic-part fusion library.
 *
 * Objects are opaque handles created by *_load / *_read / *_create functions
 * and released with the matching *_free. Every fallible call returns a
 * jppf_status; on failure jppf_last_error() describes the problem (the text
 * is thread-local and valid until the next call on the same thread).
 * Strings returned through char** out-parameters are released with
 * jppf_string_free.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(JPPF_BUILDING_LIBRARY)
#define JPPF_API __attribute__((visibility("default")))
#else
#define JPPF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define JPPF_ABI_VERSION 1

typedef enum jppf_status {
  JPPF_OK = 0,
  JPPF_ERR_INVALID_ARGUMENT = 1, /* null handle, bad parameter */
  JPPF_ERR_IO = 2,               /* file cannot be opened or written */
  JPPF_ERR_FORMAT = 3,           /* malformed container, PNG or JSON */
  JPPF_ERR_TAXONOMY = 4,         /* taxonomy violations, unknown class/part */
  JPPF_ERR_SHAPE = 5,            /* tensor or map shape mismatch */
  JPPF_ERR_RANGE = 6,            /* value outside [0,1], box outside canvas */
  JPPF_ERR_OVERFLOW = 7,         /* label field exceeds its bit budget */
  JPPF_ERR_INTERNAL = 8          /* internal invariant violated */
} jppf_status;

typedef struct jppf_taxonomy jppf_taxonomy;
typedef struct jppf_tensor jppf_tensor;
typedef struct jppf_instances jppf_instances;
typedef struct jppf_label_map jppf_label_map;
typedef struct jppf_candidates jppf_candidates;

typedef enum jppf_dtype { JPPF_DTYPE_F32 = 1, JPPF_DTYPE_U32 = 2 } jppf_dtype;

typedef struct jppf_fusion_config {
  uint64_t min_stuff_area; /* stuff regions below this pixel count become VOID */
  double conf_threshold;
  double iou_threshold;
  int per_class_nms;       /* 0: one suppression pool for all things */
  unsigned threads;        /* output does not depend on this */
} jppf_fusion_config;

typedef struct jppf_label {
  uint32_t semantic;
  uint32_t instance;
  uint32_t part;
} jppf_label;

JPPF_API int jppf_abi_version(void);
JPPF_API const char* jppf_last_error(void);
JPPF_API const char* jppf_status_string(jppf_status status);
JPPF_API void jppf_string_free(char* s);

/* Defaults: min_stuff_area 2048, thresholds 0.5, class-agnostic NMS, 1 thread. */
JPPF_API void jppf_fusion_config_init(jppf_fusion_config* cfg);

/* ---- taxonomy ---------------------------------------------------------- */

/* Loads and validates; fails with JPPF_ERR_TAXONOMY on any violation. */
JPPF_API jppf_status jppf_taxonomy_load(const char* path, jppf_taxonomy** out);
JPPF_API jppf_status jppf_taxonomy_parse(const char* json, jppf_taxonomy** out);
JPPF_API void jppf_taxonomy_free(jppf_taxonomy* t);
JPPF_API size_t jppf_taxonomy_num_stuff(const jppf_taxonomy* t);
JPPF_API size_t jppf_taxonomy_num_things(const jppf_taxonomy* t);
JPPF_API size_t jppf_taxonomy_num_part_groups(const jppf_taxonomy* t);
/* JSON array of {"field","rule"}; empty array when the file is valid. */
JPPF_API jppf_status jppf_taxonomy_lint(const char* path, char** report_json);
JPPF_API jppf_status jppf_ungroup_part(const jppf_taxonomy* t, uint32_t semantic, uint32_t group,
                                       uint32_t* part);

/* ---- labels ------------------------------------------------------------ */

JPPF_API jppf_status jppf_encode_label(jppf_label label, uint32_t* encoded);
JPPF_API jppf_label jppf_decode_label(uint32_t encoded);

/* ---- tensors (JPPT container) ------------------------------------------ */

JPPF_API jppf_status jppf_tensor_read(const char* path, jppf_tensor** out);
JPPF_API jppf_status jppf_tensor_write(const jppf_tensor* t, const char* path);
/* Copies `data` (product(dims) elements of the given dtype). */
JPPF_API jppf_status jppf_tensor_create(jppf_dtype dtype, size_t rank, const uint32_t* dims,
                                        const void* data, jppf_tensor** out);
JPPF_API void jppf_tensor_free(jppf_tensor* t);
JPPF_API jppf_dtype jppf_tensor_dtype(const jppf_tensor* t);
JPPF_API size_t jppf_tensor_rank(const jppf_tensor* t);
JPPF_API uint32_t jppf_tensor_dim(const jppf_tensor* t, size_t axis);
JPPF_API const void* jppf_tensor_data(const jppf_tensor* t);

/* ---- instance predictions ---------------------------------------------- */

JPPF_API jppf_status jppf_instances_read(const char* path, jppf_instances** out);
JPPF_API void jppf_instances_free(jppf_instances* inst);
JPPF_API size_t jppf_instances_count(const jppf_instances* inst);

/* ---- label maps -------------------------------------------------------- */

JPPF_API jppf_status jppf_label_map_create(size_t height, size_t width, jppf_label_map** out);
JPPF_API jppf_status jppf_label_map_read_png(const char* path, jppf_label_map** out);
JPPF_API jppf_status jppf_label_map_write_png(const jppf_label_map* map, const char* path);
JPPF_API void jppf_label_map_free(jppf_label_map* map);
JPPF_API size_t jppf_label_map_height(const jppf_label_map* map);
JPPF_API size_t jppf_label_map_width(const jppf_label_map* map);
JPPF_API jppf_status jppf_label_map_get(const jppf_label_map* map, size_t y, size_t x,
                                        jppf_label* out);
JPPF_API jppf_status jppf_label_map_set(jppf_label_map* map, size_t y, size_t x, jppf_label label);
JPPF_API double jppf_label_map_density(const jppf_label_map* map);
/* Number of non-void pixels violating label consistency under `t`. */
JPPF_API jppf_status jppf_label_map_count_violations(const jppf_label_map* map,
                                                     const jppf_taxonomy* t, size_t* count);
/* 8-bit RGB visualization PNG. */
JPPF_API jppf_status jppf_render_png(const jppf_label_map* map, const jppf_taxonomy* t,
                                     const char* path);

/* ---- fusion ------------------------------------------------------------ */

/* semantic: f32 [C_st + C_th, H, W]; parts: f32 [C_p + 1, H, W].
 * `candidates` may be NULL; otherwise it receives the fused candidate stack. */
JPPF_API jppf_status jppf_fuse(const jppf_taxonomy* t, const jppf_tensor* semantic,
                               const jppf_tensor* parts, const jppf_instances* instances,
                               const jppf_fusion_config* cfg, jppf_label_map** out,
                               jppf_candidates** candidates);
/* Panoptic (semantic + instance) fusion; parts of the output are 0. */
JPPF_API jppf_status jppf_panoptic_fuse(const jppf_taxonomy* t, const jppf_tensor* semantic,
                                        const jppf_instances* instances,
                                        const jppf_fusion_config* cfg, jppf_label_map** out);
/* parts: f32 [C_p + 1, H, W] logits (argmax is taken) or u32 [H, W] part
 * channel indices. */
JPPF_API jppf_status jppf_merge_top_down(const jppf_taxonomy* t, const jppf_label_map* panoptic,
                                         const jppf_tensor* parts, jppf_label_map** out);

JPPF_API size_t jppf_candidates_count(const jppf_candidates* c);
JPPF_API jppf_label jppf_candidates_identity(const jppf_candidates* c, size_t channel);
/* Writes f32 [N_pp, H, W] to `path` and the channel identities to
 * `path` + ".json". */
JPPF_API jppf_status jppf_candidates_write(const jppf_candidates* c, const char* path);
JPPF_API void jppf_candidates_free(jppf_candidates* c);

/* ---- evaluation -------------------------------------------------------- */

/* report_json: {"PartPQ":{"All","P","NP"},"PQ","mIoU_semantic","mIoU_part","density"}.
 * report_csv may be NULL; otherwise it receives per-class rows. */
JPPF_API jppf_status jppf_evaluate(const jppf_taxonomy* t, const jppf_label_map* pred,
                                   const jppf_label_map* gt, char** report_json,
                                   char** report_csv);

/* ---- synthetic scenes -------------------------------------------------- */

/* Random spec as JSON for the given canvas; max_things bounds the count. */
JPPF_API jppf_status jppf_synth_random_spec(const jppf_taxonomy* t, uint64_t seed, size_t height,
                                            size_t width, size_t max_things, int noisy,
                                            char** spec_json);
/* Generates the scene for `spec_json` and writes the scene directory. */
JPPF_API jppf_status jppf_synth_write_scene(const jppf_taxonomy* t, const char* spec_json,
                                            const char* dir);
/* Conflict-suite member `index` of a suite of `n` scenes, as spec JSON. */
JPPF_API jppf_status jppf_synth_conflict_spec(const jppf_taxonomy* t, uint64_t seed, size_t n,
                                              size_t index, size_t height, size_t width,
                                              char** spec_json);
/* Checks a scene directory against the taxonomy; report is a JSON array of
 * problem strings (empty when clean). */
JPPF_API jppf_status jppf_scene_lint(const jppf_taxonomy* t, const char* dir, char** report_json);

#ifdef __cplusplus
}
#endif

#endif  // JPPF_JPPF_H_
