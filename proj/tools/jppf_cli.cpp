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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "jppf/jppf.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 2;
constexpr int kExitInternal = 3;

struct Failure {
  jppf_status status;
  std::string message;
};

void check(jppf_status s, const std::string& context) {
  if (s != JPPF_OK) throw Failure{s, context + ": " + jppf_last_error()};
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Taxonomy = std::unique_ptr<jppf_taxonomy, Deleter<jppf_taxonomy, jppf_taxonomy_free>>;
using Tensor = std::unique_ptr<jppf_tensor, Deleter<jppf_tensor, jppf_tensor_free>>;
using Instances = std::unique_ptr<jppf_instances, Deleter<jppf_instances, jppf_instances_free>>;
using LabelMap = std::unique_ptr<jppf_label_map, Deleter<jppf_label_map, jppf_label_map_free>>;
using Candidates = std::unique_ptr<jppf_candidates, Deleter<jppf_candidates, jppf_candidates_free>>;

struct OwnedString {
  char* p = nullptr;
  ~OwnedString() { jppf_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

Taxonomy load_taxonomy(const std::string& path) {
  jppf_taxonomy* t = nullptr;
  check(jppf_taxonomy_load(path.c_str(), &t), "taxonomy " + path);
  return Taxonomy(t);
}

Tensor load_tensor(const std::string& path) {
  jppf_tensor* t = nullptr;
  check(jppf_tensor_read(path.c_str(), &t), "tensor " + path);
  return Tensor(t);
}

Instances load_instances(const std::string& path) {
  jppf_instances* i = nullptr;
  check(jppf_instances_read(path.c_str(), &i), "instances " + path);
  return Instances(i);
}

LabelMap load_map(const std::string& path) {
  jppf_label_map* m = nullptr;
  check(jppf_label_map_read_png(path.c_str(), &m), "label map " + path);
  return LabelMap(m);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{JPPF_ERR_IO, "cannot open " + path};
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text << '\n';
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{JPPF_ERR_IO, "cannot write " + path};
  out << text << '\n';
}

// Fusion flags: a JSON overlay is applied first, explicit flags win.
struct FusionFlags {
  std::string config_path;
  std::optional<std::uint64_t> min_stuff_area;
  std::optional<double> conf_threshold;
  std::optional<double> iou_threshold;
  bool per_class_nms = false;
  unsigned threads = 1;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON overlay of fusion settings");
    cmd->add_option("--min-stuff-area", min_stuff_area, "Stuff regions below this area become VOID");
    cmd->add_option("--conf-threshold", conf_threshold, "Instance confidence threshold");
    cmd->add_option("--iou-threshold", iou_threshold, "Box IoU threshold for suppression");
    cmd->add_flag("--per-class-nms", per_class_nms, "Suppress overlaps only within a class");
    cmd->add_option("--threads", threads, "Worker threads (output does not depend on it)")
        ->check(CLI::PositiveNumber);
  }

  jppf_fusion_config resolve() const {
    jppf_fusion_config cfg;
    jppf_fusion_config_init(&cfg);
    if (!config_path.empty()) {
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(slurp(config_path));
        if (doc.contains("min_stuff_area")) cfg.min_stuff_area = doc["min_stuff_area"].get<std::uint64_t>();
        if (doc.contains("conf_threshold")) cfg.conf_threshold = doc["conf_threshold"].get<double>();
        if (doc.contains("iou_threshold")) cfg.iou_threshold = doc["iou_threshold"].get<double>();
        if (doc.contains("per_class_nms")) cfg.per_class_nms = doc["per_class_nms"].get<bool>() ? 1 : 0;
        if (doc.contains("threads")) cfg.threads = doc["threads"].get<unsigned>();
      } catch (const nlohmann::json::exception& e) {
        throw Failure{JPPF_ERR_FORMAT, "config " + config_path + ": " + e.what()};
      }
    }
    if (min_stuff_area) cfg.min_stuff_area = *min_stuff_area;
    if (conf_threshold) cfg.conf_threshold = *conf_threshold;
    if (iou_threshold) cfg.iou_threshold = *iou_threshold;
    if (per_class_nms) cfg.per_class_nms = 1;
    if (threads != 1 || cfg.threads == 0) cfg.threads = threads;
    return cfg;
  }
};

// Inputs either come from a scene directory or from individual files.
struct SceneFlags {
  std::string scene;
  std::string semantic;
  std::string parts;
  std::string instances;

  void attach(CLI::App* cmd, bool with_parts) {
    cmd->add_option("--scene", scene, "Scene directory (semantic.jppt, parts.jppt, instances.json)");
    cmd->add_option("--semantic", semantic, "Semantic logits tensor");
    if (with_parts) cmd->add_option("--parts", parts, "Part logits tensor");
    cmd->add_option("--instances", instances, "Instance prediction JSON");
  }

  std::string path(const std::string& explicit_path, const char* file) const {
    if (!explicit_path.empty()) return explicit_path;
    if (scene.empty()) throw Failure{JPPF_ERR_INVALID_ARGUMENT, std::string("missing --scene or input for ") + file};
    return (fs::path(scene) / file).string();
  }

  std::optional<std::string> instances_path() const {
    if (!instances.empty()) return instances;
    if (scene.empty()) return std::nullopt;
    fs::path p = fs::path(scene) / "instances.json";
    if (!fs::exists(p)) return std::nullopt;
    return p.string();
  }
};

int run_fuse(const std::string& tax_path, const SceneFlags& in, const FusionFlags& flags,
             const std::string& output, const std::string& candidates_path, const std::string& render_path) {
  auto t = load_taxonomy(tax_path);
  auto s = load_tensor(in.path(in.semantic, "semantic.jppt"));
  auto p = load_tensor(in.path(in.parts, "parts.jppt"));
  Instances inst;
  if (auto ip = in.instances_path()) inst = load_instances(*ip);
  const jppf_fusion_config cfg = flags.resolve();
  jppf_label_map* out = nullptr;
  jppf_candidates* cand = nullptr;
  check(jppf_fuse(t.get(), s.get(), p.get(), inst.get(), &cfg, &out,
                  candidates_path.empty() ? nullptr : &cand),
        "fuse");
  LabelMap map(out);
  Candidates owned(cand);
  check(jppf_label_map_write_png(map.get(), output.c_str()), "write " + output);
  if (owned) check(jppf_candidates_write(owned.get(), candidates_path.c_str()), "write " + candidates_path);
  if (!render_path.empty()) check(jppf_render_png(map.get(), t.get(), render_path.c_str()), "render");
  return kExitOk;
}

int run_panoptic(const std::string& tax_path, const SceneFlags& in, const FusionFlags& flags,
                 const std::string& output) {
  auto t = load_taxonomy(tax_path);
  auto s = load_tensor(in.path(in.semantic, "semantic.jppt"));
  Instances inst;
  if (auto ip = in.instances_path()) inst = load_instances(*ip);
  const jppf_fusion_config cfg = flags.resolve();
  jppf_label_map* out = nullptr;
  check(jppf_panoptic_fuse(t.get(), s.get(), inst.get(), &cfg, &out), "panoptic");
  LabelMap map(out);
  check(jppf_label_map_write_png(map.get(), output.c_str()), "write " + output);
  return kExitOk;
}

int run_merge(const std::string& tax_path, const std::string& panoptic, const std::string& parts,
              const std::string& output) {
  auto t = load_taxonomy(tax_path);
  auto pan = load_map(panoptic);
  auto p = load_tensor(parts);
  jppf_label_map* out = nullptr;
  check(jppf_merge_top_down(t.get(), pan.get(), p.get(), &out), "merge");
  LabelMap map(out);
  check(jppf_label_map_write_png(map.get(), output.c_str()), "write " + output);
  return kExitOk;
}

int run_eval(const std::string& tax_path, const std::string& pred, const std::string& gt,
             const std::string& output, const std::string& csv) {
  auto t = load_taxonomy(tax_path);
  auto pm = load_map(pred);
  auto gm = load_map(gt);
  OwnedString json;
  OwnedString table;
  check(jppf_evaluate(t.get(), pm.get(), gm.get(), &json.p, csv.empty() ? nullptr : &table.p), "eval");
  emit(json.str(), output);
  if (!csv.empty()) {
    std::ofstream out(csv, std::ios::binary);
    if (!out) throw Failure{JPPF_ERR_IO, "cannot write " + csv};
    out << table.str();
  }
  return kExitOk;
}

struct SynthFlags {
  std::string spec;
  std::uint64_t seed = 0;
  std::size_t height = 32;
  std::size_t width = 32;
  std::size_t max_things = 4;
  bool noisy = false;
  std::size_t conflict_n = 0;
  std::size_t conflict_index = 0;
};

int run_synth(const std::string& tax_path, const SynthFlags& f, const std::string& output) {
  auto t = load_taxonomy(tax_path);
  std::string spec;
  if (!f.spec.empty()) {
    spec = slurp(f.spec);
  } else if (f.conflict_n > 0) {
    OwnedString s;
    check(jppf_synth_conflict_spec(t.get(), f.seed, f.conflict_n, f.conflict_index, f.height, f.width, &s.p),
          "conflict spec");
    spec = s.str();
  } else {
    OwnedString s;
    check(jppf_synth_random_spec(t.get(), f.seed, f.height, f.width, f.max_things, f.noisy ? 1 : 0, &s.p),
          "random spec");
    spec = s.str();
  }
  check(jppf_synth_write_scene(t.get(), spec.c_str(), output.c_str()), "synth");
  return kExitOk;
}

int run_render(const std::string& tax_path, const std::string& input, const std::string& output) {
  auto t = load_taxonomy(tax_path);
  auto m = load_map(input);
  check(jppf_render_png(m.get(), t.get(), output.c_str()), "render");
  return kExitOk;
}

int run_validate(const std::string& tax_path, const std::string& scene, const std::string& map_path) {
  OwnedString lint;
  check(jppf_taxonomy_lint(tax_path.c_str(), &lint.p), "taxonomy " + tax_path);
  nlohmann::ordered_json report;
  report["taxonomy"] = nlohmann::json::parse(lint.str());
  bool clean = report["taxonomy"].empty();
  if (clean && !scene.empty()) {
    auto t = load_taxonomy(tax_path);
    OwnedString s;
    check(jppf_scene_lint(t.get(), scene.c_str(), &s.p), "scene " + scene);
    report["scene"] = nlohmann::json::parse(s.str());
    clean = report["scene"].empty();
  }
  if (clean && !map_path.empty()) {
    auto t = load_taxonomy(tax_path);
    auto m = load_map(map_path);
    std::size_t n = 0;
    check(jppf_label_map_count_violations(m.get(), t.get(), &n), "map " + map_path);
    report["map_violations"] = n;
    clean = n == 0;
  }
  std::cout << report.dump(2) << '\n';
  return clean ? kExitOk : kExitBadInput;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint panoptic-part fusion"};
  app.require_subcommand(1);
  std::string taxonomy;
  std::string output;

  auto add_taxonomy = [&](CLI::App* cmd) {
    cmd->add_option("--taxonomy,-t", taxonomy, "Taxonomy JSON")->required();
  };

  SceneFlags scene_in;
  FusionFlags fusion;
  std::string candidates;
  std::string render_out;
  auto* fuse = app.add_subcommand("fuse", "Fuse semantic, instance and part predictions");
  add_taxonomy(fuse);
  scene_in.attach(fuse, true);
  fusion.attach(fuse);
  fuse->add_option("--output,-o", output, "Panoptic-part label PNG")->required();
  fuse->add_option("--candidates", candidates, "Dump fused candidate channels to this tensor path");
  fuse->add_option("--render", render_out, "Also write a color visualization");

  auto* panoptic = app.add_subcommand("panoptic", "Fuse semantic and instance predictions only");
  add_taxonomy(panoptic);
  scene_in.attach(panoptic, false);
  fusion.attach(panoptic);
  panoptic->add_option("--output,-o", output, "Panoptic label PNG")->required();

  std::string pan_in;
  std::string parts_in;
  auto* merge = app.add_subcommand("merge", "Top-down merge of a panoptic map with part predictions");
  add_taxonomy(merge);
  merge->add_option("--panoptic", pan_in, "Panoptic label PNG")->required();
  merge->add_option("--parts", parts_in, "Part logits (f32 [C,H,W]) or part map (u32 [H,W])")->required();
  merge->add_option("--output,-o", output, "Panoptic-part label PNG")->required();

  std::string pred;
  std::string gt;
  std::string csv;
  auto* eval = app.add_subcommand("eval", "Evaluate a prediction against ground truth");
  add_taxonomy(eval);
  eval->add_option("--pred", pred, "Predicted label PNG")->required();
  eval->add_option("--gt", gt, "Ground-truth label PNG")->required();
  eval->add_option("--output,-o", output, "Metrics JSON (stdout when omitted)");
  eval->add_option("--csv", csv, "Per-class metrics CSV");

  SynthFlags synth_flags;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic scene directory");
  add_taxonomy(synth);
  synth->add_option("--spec", synth_flags.spec, "Scene spec JSON");
  synth->add_option("--seed", synth_flags.seed, "Seed for a random spec");
  synth->add_option("--height", synth_flags.height, "Canvas height")->check(CLI::PositiveNumber);
  synth->add_option("--width", synth_flags.width, "Canvas width")->check(CLI::PositiveNumber);
  synth->add_option("--max-things", synth_flags.max_things, "Upper bound on things in a random spec");
  synth->add_flag("--noisy", synth_flags.noisy, "Add prediction noise");
  synth->add_option("--conflict-suite", synth_flags.conflict_n, "Pick a member of a conflict suite of this size");
  synth->add_option("--index", synth_flags.conflict_index, "Conflict suite member");
  synth->add_option("--output,-o", output, "Scene directory")->required();

  std::string render_in;
  auto* render = app.add_subcommand("render", "Color visualization of a label PNG");
  add_taxonomy(render);
  render->add_option("--input,-i", render_in, "Label PNG")->required();
  render->add_option("--output,-o", output, "8-bit RGB PNG")->required();

  std::string lint_scene;
  std::string lint_map;
  auto* validate = app.add_subcommand("validate", "Lint a taxonomy and optionally a scene or label map");
  add_taxonomy(validate);
  validate->add_option("--scene", lint_scene, "Scene directory");
  validate->add_option("--map", lint_map, "Label PNG to check for consistency");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  try {
    if (*fuse) return run_fuse(taxonomy, scene_in, fusion, output, candidates, render_out);
    if (*panoptic) return run_panoptic(taxonomy, scene_in, fusion, output);
    if (*merge) return run_merge(taxonomy, pan_in, parts_in, output);
    if (*eval) return run_eval(taxonomy, pred, gt, output, csv);
    if (*synth) return run_synth(taxonomy, synth_flags, output);
    if (*render) return run_render(taxonomy, render_in, output);
    if (*validate) return run_validate(taxonomy, lint_scene, lint_map);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    return f.status == JPPF_ERR_INTERNAL ? kExitInternal : kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitBadInput;
}
