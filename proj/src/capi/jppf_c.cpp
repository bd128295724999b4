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

#include "jppf/jppf.h"

#include <cstring>
#include <exception>
#include <filesystem>
#include <new>
#include <string>
#include <variant>

#include <json.hpp>

#include "core/error.hpp"
#include "core/fusion.hpp"
#include "core/metrics.hpp"
#include "core/taxonomy.hpp"
#include "core/topdown.hpp"
#include "io/png_io.hpp"
#include "io/scene_io.hpp"
#include "io/tensor_io.hpp"
#include "synth/scene.hpp"

struct jppf_taxonomy {
  jppf::ClassTaxonomy value;
};
struct jppf_tensor {
  jppf::io::AnyTensor value;
};
struct jppf_instances {
  std::vector<jppf::InstancePrediction> value;
};
struct jppf_label_map {
  jppf::PanopticPartMap value;
};
struct jppf_candidates {
  jppf::CandidateStack value;
};

namespace {

thread_local std::string last_error;

jppf_status status_of(jppf::ErrorCode code) {
  using jppf::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kInvalidSpec:
      return JPPF_ERR_INVALID_ARGUMENT;
    case ErrorCode::kIo:
      return JPPF_ERR_IO;
    case ErrorCode::kBadMagic:
    case ErrorCode::kUnsupportedVersion:
    case ErrorCode::kTruncatedPayload:
    case ErrorCode::kDecodeError:
      return JPPF_ERR_FORMAT;
    case ErrorCode::kInvalidTaxonomy:
    case ErrorCode::kUnknownGroupForClass:
    case ErrorCode::kNotAThingClass:
      return JPPF_ERR_TAXONOMY;
    case ErrorCode::kShapeMismatch:
    case ErrorCode::kMissingBackgroundChannel:
      return JPPF_ERR_SHAPE;
    case ErrorCode::kValueOutOfRange:
    case ErrorCode::kBoxOutOfCanvas:
      return JPPF_ERR_RANGE;
    case ErrorCode::kFieldOverflow:
      return JPPF_ERR_OVERFLOW;
    case ErrorCode::kInternal:
      return JPPF_ERR_INTERNAL;
  }
  return JPPF_ERR_INTERNAL;
}

template <typename F>
jppf_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return JPPF_OK;
  } catch (const jppf::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return JPPF_ERR_INTERNAL;
  } catch (const std::filesystem::filesystem_error& e) {
    last_error = e.what();
    return JPPF_ERR_IO;
  } catch (const std::exception& e) {
    last_error = e.what();
    return JPPF_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw jppf::Error(jppf::ErrorCode::kInvalidArgument, what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

jppf_label to_c(const jppf::PanopticPartLabel& l) { return {l.semantic, l.instance, l.part}; }

const jppf::TensorF32& as_f32(const jppf_tensor* t, const char* what) {
  require(t != nullptr, what);
  const auto* f = std::get_if<jppf::TensorF32>(&t->value);
  if (f == nullptr) {
    throw jppf::Error(jppf::ErrorCode::kDecodeError, std::string(what) + " must be an f32 tensor");
  }
  return *f;
}

jppf::FusionConfig to_cpp(const jppf_fusion_config* cfg) {
  jppf::FusionConfig out;
  if (cfg == nullptr) return out;
  out.min_stuff_area = cfg->min_stuff_area;
  out.conf_threshold = cfg->conf_threshold;
  out.iou_threshold = cfg->iou_threshold;
  out.per_class_nms = cfg->per_class_nms != 0;
  out.threads = cfg->threads == 0 ? 1 : cfg->threads;
  if (!(out.iou_threshold >= 0.0 && out.iou_threshold <= 1.0)) {
    throw jppf::Error(jppf::ErrorCode::kInvalidArgument, "iou threshold outside [0,1]");
  }
  return out;
}

// Fused output must satisfy label consistency; anything else is a bug.
void assert_consistent(const jppf::ClassTaxonomy& t, const jppf::PanopticPartMap& map) {
  auto violations = jppf::validate_map(t, map, 1);
  if (!violations.empty()) {
    throw jppf::Error(jppf::ErrorCode::kInternal,
                      "fused map violates label consistency at (" +
                          std::to_string(violations[0].y) + ", " + std::to_string(violations[0].x) +
                          "): " + violations[0].rule);
  }
}

}  // namespace

extern "C" {

int jppf_abi_version(void) { return JPPF_ABI_VERSION; }

const char* jppf_last_error(void) { return last_error.c_str(); }

const char* jppf_status_string(jppf_status status) {
  switch (status) {
    case JPPF_OK: return "ok";
    case JPPF_ERR_INVALID_ARGUMENT: return "invalid argument";
    case JPPF_ERR_IO: return "i/o error";
    case JPPF_ERR_FORMAT: return "format error";
    case JPPF_ERR_TAXONOMY: return "taxonomy error";
    case JPPF_ERR_SHAPE: return "shape mismatch";
    case JPPF_ERR_RANGE: return "value out of range";
    case JPPF_ERR_OVERFLOW: return "field overflow";
    case JPPF_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void jppf_string_free(char* s) { std::free(s); }

void jppf_fusion_config_init(jppf_fusion_config* cfg) {
  if (cfg == nullptr) return;
  jppf::FusionConfig d;
  cfg->min_stuff_area = d.min_stuff_area;
  cfg->conf_threshold = d.conf_threshold;
  cfg->iou_threshold = d.iou_threshold;
  cfg->per_class_nms = d.per_class_nms ? 1 : 0;
  cfg->threads = d.threads;
}

jppf_status jppf_taxonomy_load(const char* path, jppf_taxonomy** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new jppf_taxonomy{jppf::load_taxonomy_file(path)};
  });
}

jppf_status jppf_taxonomy_parse(const char* json, jppf_taxonomy** out) {
  return guarded([&] {
    require(json != nullptr && out != nullptr, "null argument");
    *out = new jppf_taxonomy{jppf::load_taxonomy(json)};
  });
}

void jppf_taxonomy_free(jppf_taxonomy* t) { delete t; }

size_t jppf_taxonomy_num_stuff(const jppf_taxonomy* t) { return t ? t->value.num_stuff() : 0; }
size_t jppf_taxonomy_num_things(const jppf_taxonomy* t) { return t ? t->value.num_things() : 0; }
size_t jppf_taxonomy_num_part_groups(const jppf_taxonomy* t) {
  return t ? t->value.num_part_channels() : 0;
}

jppf_status jppf_taxonomy_lint(const char* path, char** report_json) {
  return guarded([&] {
    require(path != nullptr && report_json != nullptr, "null argument");
    auto t = jppf::parse_taxonomy_json(jppf::io::read_text_file(path));
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& v : jppf::validate_taxonomy(t)) doc.push_back({{"field", v.field}, {"rule", v.rule}});
    *report_json = dup_string(doc.dump(2));
  });
}

jppf_status jppf_ungroup_part(const jppf_taxonomy* t, uint32_t semantic, uint32_t group,
                              uint32_t* part) {
  return guarded([&] {
    require(t != nullptr && part != nullptr, "null argument");
    *part = jppf::ungroup_part(t->value, semantic, group);
  });
}

jppf_status jppf_encode_label(jppf_label label, uint32_t* encoded) {
  return guarded([&] {
    require(encoded != nullptr, "null argument");
    *encoded = jppf::encode_label({label.semantic, label.instance, label.part});
  });
}

jppf_label jppf_decode_label(uint32_t encoded) { return to_c(jppf::decode_label(encoded)); }

jppf_status jppf_tensor_read(const char* path, jppf_tensor** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new jppf_tensor{jppf::io::read_tensor(path)};
  });
}

jppf_status jppf_tensor_write(const jppf_tensor* t, const char* path) {
  return guarded([&] {
    require(t != nullptr && path != nullptr, "null argument");
    jppf::io::write_tensor(t->value, path);
  });
}

jppf_status jppf_tensor_create(jppf_dtype dtype, size_t rank, const uint32_t* dims, const void* data,
                               jppf_tensor** out) {
  return guarded([&] {
    require(out != nullptr && (rank == 0 || dims != nullptr), "null argument");
    std::vector<std::uint32_t> d(dims, dims + rank);
    const std::size_t n = jppf::TensorF32::element_count(d);
    require(n == 0 || data != nullptr, "null data");
    if (dtype == JPPF_DTYPE_F32) {
      const auto* p = static_cast<const float*>(data);
      *out = new jppf_tensor{jppf::TensorF32(d, std::vector<float>(p, p + n))};
    } else if (dtype == JPPF_DTYPE_U32) {
      const auto* p = static_cast<const std::uint32_t*>(data);
      *out = new jppf_tensor{jppf::TensorU32(d, std::vector<std::uint32_t>(p, p + n))};
    } else {
      throw jppf::Error(jppf::ErrorCode::kInvalidArgument, "unknown dtype");
    }
  });
}

void jppf_tensor_free(jppf_tensor* t) { delete t; }

jppf_dtype jppf_tensor_dtype(const jppf_tensor* t) {
  return std::holds_alternative<jppf::TensorF32>(t->value) ? JPPF_DTYPE_F32 : JPPF_DTYPE_U32;
}

size_t jppf_tensor_rank(const jppf_tensor* t) {
  return std::visit([](const auto& v) { return v.rank(); }, t->value);
}

uint32_t jppf_tensor_dim(const jppf_tensor* t, size_t axis) {
  return std::visit([&](const auto& v) { return axis < v.rank() ? v.dims[axis] : 0u; }, t->value);
}

const void* jppf_tensor_data(const jppf_tensor* t) {
  return std::visit([](const auto& v) { return static_cast<const void*>(v.data.data()); }, t->value);
}

jppf_status jppf_instances_read(const char* path, jppf_instances** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new jppf_instances{jppf::io::read_instances(path)};
  });
}

void jppf_instances_free(jppf_instances* inst) { delete inst; }

size_t jppf_instances_count(const jppf_instances* inst) { return inst ? inst->value.size() : 0; }

jppf_status jppf_label_map_create(size_t height, size_t width, jppf_label_map** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    *out = new jppf_label_map{jppf::PanopticPartMap(height, width)};
  });
}

jppf_status jppf_label_map_read_png(const char* path, jppf_label_map** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new jppf_label_map{jppf::io::read_labelmap_png(path)};
  });
}

jppf_status jppf_label_map_write_png(const jppf_label_map* map, const char* path) {
  return guarded([&] {
    require(map != nullptr && path != nullptr, "null argument");
    jppf::io::write_labelmap_png(map->value, path);
  });
}

void jppf_label_map_free(jppf_label_map* map) { delete map; }

size_t jppf_label_map_height(const jppf_label_map* map) { return map ? map->value.height() : 0; }
size_t jppf_label_map_width(const jppf_label_map* map) { return map ? map->value.width() : 0; }

jppf_status jppf_label_map_get(const jppf_label_map* map, size_t y, size_t x, jppf_label* out) {
  return guarded([&] {
    require(map != nullptr && out != nullptr, "null argument");
    require(y < map->value.height() && x < map->value.width(), "pixel outside map");
    *out = to_c(map->value.at(y, x));
  });
}

jppf_status jppf_label_map_set(jppf_label_map* map, size_t y, size_t x, jppf_label label) {
  return guarded([&] {
    require(map != nullptr, "null argument");
    require(y < map->value.height() && x < map->value.width(), "pixel outside map");
    map->value.at(y, x) = {label.semantic, label.instance, label.part};
  });
}

double jppf_label_map_density(const jppf_label_map* map) {
  return map ? jppf::density(map->value) : 0.0;
}

jppf_status jppf_label_map_count_violations(const jppf_label_map* map, const jppf_taxonomy* t,
                                            size_t* count) {
  return guarded([&] {
    require(map != nullptr && t != nullptr && count != nullptr, "null argument");
    *count = jppf::validate_map(t->value, map->value, static_cast<std::size_t>(-1)).size();
  });
}

jppf_status jppf_render_png(const jppf_label_map* map, const jppf_taxonomy* t, const char* path) {
  return guarded([&] {
    require(map != nullptr && t != nullptr && path != nullptr, "null argument");
    jppf::io::write_file(path, jppf::io::encode_rgb_png(jppf::io::render(map->value, t->value)));
  });
}

jppf_status jppf_fuse(const jppf_taxonomy* t, const jppf_tensor* semantic, const jppf_tensor* parts,
                      const jppf_instances* instances, const jppf_fusion_config* cfg,
                      jppf_label_map** out, jppf_candidates** candidates) {
  return guarded([&] {
    require(t != nullptr && out != nullptr, "null argument");
    const auto& tax = t->value;
    auto s = jppf::make_semantic_logits(tax, as_f32(semantic, "semantic"));
    auto p = jppf::make_part_logits(tax, as_f32(parts, "parts"));
    std::vector<jppf::InstancePrediction> raw;
    if (instances != nullptr) raw = instances->value;
    auto result = jppf::run_jppf(s, p, std::move(raw), to_cpp(cfg), tax);
    assert_consistent(tax, result.map);
    *out = new jppf_label_map{std::move(result.map)};
    if (candidates != nullptr) *candidates = new jppf_candidates{std::move(result.candidates)};
  });
}

jppf_status jppf_panoptic_fuse(const jppf_taxonomy* t, const jppf_tensor* semantic,
                               const jppf_instances* instances, const jppf_fusion_config* cfg,
                               jppf_label_map** out) {
  return guarded([&] {
    require(t != nullptr && out != nullptr, "null argument");
    const auto& tax = t->value;
    auto s = jppf::make_semantic_logits(tax, as_f32(semantic, "semantic"));
    std::vector<jppf::InstancePrediction> raw;
    if (instances != nullptr) raw = instances->value;
    auto map = jppf::panoptic_fuse(s, std::move(raw), to_cpp(cfg), tax);
    assert_consistent(tax, map);
    *out = new jppf_label_map{std::move(map)};
  });
}

jppf_status jppf_merge_top_down(const jppf_taxonomy* t, const jppf_label_map* panoptic,
                                const jppf_tensor* parts, jppf_label_map** out) {
  return guarded([&] {
    require(t != nullptr && panoptic != nullptr && parts != nullptr && out != nullptr, "null argument");
    const auto& tax = t->value;
    jppf::PartGroupMap groups;
    if (const auto* u = std::get_if<jppf::TensorU32>(&parts->value)) {
      if (u->rank() != 2) throw jppf::Error(jppf::ErrorCode::kShapeMismatch, "part map must be [H, W]");
      groups = {u->dims[0], u->dims[1], u->data};
    } else {
      groups = jppf::part_argmax(jppf::make_part_logits(tax, std::get<jppf::TensorF32>(parts->value)));
    }
    *out = new jppf_label_map{jppf::merge_top_down(panoptic->value, groups, tax)};
  });
}

size_t jppf_candidates_count(const jppf_candidates* c) { return c ? c->value.size() : 0; }

jppf_label jppf_candidates_identity(const jppf_candidates* c, size_t channel) {
  if (c == nullptr || channel >= c->value.size()) return {0, 0, 0};
  return to_c(c->value.identities[channel]);
}

jppf_status jppf_candidates_write(const jppf_candidates* c, const char* path) {
  return guarded([&] {
    require(c != nullptr && path != nullptr, "null argument");
    const auto& st = c->value;
    jppf::TensorF32 dump({static_cast<std::uint32_t>(st.size()), static_cast<std::uint32_t>(st.height),
                          static_cast<std::uint32_t>(st.width)});
    const std::size_t plane = st.height * st.width;
    for (std::size_t k = 0; k < st.size(); ++k) {
      auto dense = st.channels[k].dense();
      std::copy(dense.begin(), dense.end(), dump.data.begin() + static_cast<std::ptrdiff_t>(k * plane));
    }
    jppf::io::write_tensor(dump, path);
    nlohmann::ordered_json doc;
    doc["num_stuff_channels"] = st.num_stuff_channels;
    doc["num_things"] = st.num_things;
    doc["num_things_np"] = st.num_things_np;
    doc["num_things_p"] = st.num_things_p;
    doc["channels"] = nlohmann::ordered_json::array();
    for (const auto& id : st.identities) {
      doc["channels"].push_back({{"s", id.semantic}, {"id", id.instance}, {"p", id.part}});
    }
    jppf::io::write_text_file(std::string(path) + ".json", doc.dump(2));
  });
}

void jppf_candidates_free(jppf_candidates* c) { delete c; }

jppf_status jppf_evaluate(const jppf_taxonomy* t, const jppf_label_map* pred, const jppf_label_map* gt,
                          char** report_json, char** report_csv) {
  return guarded([&] {
    require(t != nullptr && pred != nullptr && gt != nullptr && report_json != nullptr, "null argument");
    auto report = jppf::evaluate(pred->value, gt->value, t->value);
    std::string json = jppf::report_json(report);
    std::string csv = report_csv ? jppf::report_csv(report, t->value) : std::string{};
    *report_json = dup_string(json);
    if (report_csv != nullptr) *report_csv = dup_string(csv);
  });
}

jppf_status jppf_synth_random_spec(const jppf_taxonomy* t, uint64_t seed, size_t height, size_t width,
                                   size_t max_things, int noisy, char** spec_json) {
  return guarded([&] {
    require(t != nullptr && spec_json != nullptr, "null argument");
    auto spec = jppf::synth::random_spec(t->value, seed, height, width, max_things, noisy != 0);
    jppf::synth::check_spec(spec, t->value);
    *spec_json = dup_string(jppf::synth::spec_to_json(spec));
  });
}

jppf_status jppf_synth_write_scene(const jppf_taxonomy* t, const char* spec_json, const char* dir) {
  return guarded([&] {
    require(t != nullptr && spec_json != nullptr && dir != nullptr, "null argument");
    auto spec = jppf::synth::spec_from_json(spec_json);
    auto scene = jppf::synth::generate(spec, t->value);
    jppf::io::SceneData data;
    data.semantic = jppf::to_tensor(scene.semantic);
    data.parts = jppf::to_tensor(scene.parts);
    data.instances = std::move(scene.instances);
    data.gt = std::move(scene.gt);
    data.spec_json = jppf::synth::spec_to_json(spec);
    jppf::io::write_scene(data, dir);
  });
}

jppf_status jppf_synth_conflict_spec(const jppf_taxonomy* t, uint64_t seed, size_t n, size_t index,
                                     size_t height, size_t width, char** spec_json) {
  return guarded([&] {
    require(t != nullptr && spec_json != nullptr, "null argument");
    require(index < n, "index outside suite");
    auto suite = jppf::synth::conflict_suite(n, seed, t->value, height, width);
    *spec_json = dup_string(jppf::synth::spec_to_json(suite[index]));
  });
}

jppf_status jppf_scene_lint(const jppf_taxonomy* t, const char* dir, char** report_json) {
  return guarded([&] {
    require(t != nullptr && dir != nullptr && report_json != nullptr, "null argument");
    const auto& tax = t->value;
    nlohmann::json problems = nlohmann::json::array();
    auto attempt = [&](auto&& fn) {
      try {
        fn();
      } catch (const jppf::Error& e) {
        if (e.code() == jppf::ErrorCode::kIo) throw;
        problems.push_back(e.what());
      }
    };
    jppf::io::SceneData scene;
    attempt([&] { scene = jppf::io::read_scene(dir); });
    if (problems.empty()) {
      jppf::DenseLogits s;
      attempt([&] { s = jppf::make_semantic_logits(tax, scene.semantic); });
      attempt([&] {
        auto p = jppf::make_part_logits(tax, scene.parts);
        if (!s.values.empty()) jppf::check_inputs(tax, s, &p);
      });
      for (std::size_t i = 0; i < scene.instances.size(); ++i) {
        attempt([&] {
          const auto& inst = scene.instances[i];
          if (!tax.is_thing(inst.class_id)) {
            throw jppf::Error(jppf::ErrorCode::kNotAThingClass,
                              "instance " + std::to_string(i) + " has non-thing class " +
                                  std::to_string(inst.class_id));
          }
          if (!s.values.empty()) jppf::check_instance(inst, s.height, s.width);
        });
      }
      if (scene.gt) {
        for (const auto& v : jppf::validate_map(tax, *scene.gt)) {
          problems.push_back("gt.png (" + std::to_string(v.y) + ", " + std::to_string(v.x) +
                             "): " + v.rule);
        }
      }
    }
    *report_json = dup_string(problems.dump(2));
  });
}

}  // extern "C"
