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

#include "io/scene_io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include <json.hpp>

#include "core/error.hpp"
#include "io/png_io.hpp"
#include "io/tensor_io.hpp"

namespace jppf::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int snap(const json& v, bool upper) {
  if (!v.is_number()) throw Error(ErrorCode::kDecodeError, "box coordinates must be numbers");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw Error(ErrorCode::kDecodeError, "box coordinate is not finite");
  return static_cast<int>(upper ? std::ceil(d) : std::floor(d));
}

}  // namespace

std::vector<InstancePrediction> read_instances(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kDecodeError, path + ": " + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorCode::kDecodeError, path + ": expected a JSON array");
  const fs::path base = fs::path(path).parent_path();
  std::vector<InstancePrediction> out;
  try {
    for (const auto& e : doc) {
      InstancePrediction p;
      const auto& box = e.at("box");
      if (!box.is_array() || box.size() != 4) {
        throw Error(ErrorCode::kDecodeError, "box must be [x0, y0, x1, y1]");
      }
      p.box = {snap(box[0], false), snap(box[1], false), snap(box[2], true), snap(box[3], true)};
      p.class_id = e.at("class_id").get<ClassId>();
      p.confidence = e.at("confidence").get<double>();
      const auto& mask = e.at("mask");
      p.mask_height = mask.at("h").get<std::size_t>();
      p.mask_width = mask.at("w").get<std::size_t>();
      TensorF32 t = read_tensor_f32((base / mask.at("tensor_ref").get<std::string>()).string());
      const bool shape_ok =
          (t.rank() == 2 && t.dims[0] == p.mask_height && t.dims[1] == p.mask_width) ||
          (t.rank() == 3 && t.dims[0] == 1 && t.dims[1] == p.mask_height && t.dims[2] == p.mask_width);
      if (!shape_ok) throw Error(ErrorCode::kShapeMismatch, "mask tensor dims differ from mask.h/w");
      p.mask = std::move(t.data);
      out.push_back(std::move(p));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kDecodeError, path + ": " + e.what());
  }
  return out;
}

void write_instances(const std::vector<InstancePrediction>& preds, const std::string& path) {
  const fs::path base = fs::path(path).parent_path();
  fs::create_directories(base / "masks");
  json doc = json::array();
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto& p = preds[i];
    char name[64];
    std::snprintf(name, sizeof(name), "masks/instance_%03zu.jppt", i);
    write_tensor(TensorF32({static_cast<std::uint32_t>(p.mask_height),
                            static_cast<std::uint32_t>(p.mask_width)},
                           p.mask),
                 (base / name).string());
    doc.push_back({{"box", {p.box.x0, p.box.y0, p.box.x1, p.box.y1}},
                   {"class_id", p.class_id},
                   {"confidence", p.confidence},
                   {"mask", {{"h", p.mask_height}, {"w", p.mask_width}, {"tensor_ref", name}}}});
  }
  write_text_file(path, doc.dump(2));
}

void write_scene(const SceneData& scene, const std::string& dir) {
  const fs::path root(dir);
  fs::create_directories(root);
  write_tensor(scene.semantic, (root / kSemanticFile).string());
  write_tensor(scene.parts, (root / kPartsFile).string());
  write_instances(scene.instances, (root / kInstancesFile).string());
  if (scene.gt) write_labelmap_png(*scene.gt, (root / kGroundTruthFile).string());
  if (scene.spec_json) write_text_file((root / kSpecFile).string(), *scene.spec_json);
}

SceneData read_scene(const std::string& dir) {
  const fs::path root(dir);
  SceneData scene;
  scene.semantic = read_tensor_f32((root / kSemanticFile).string());
  scene.parts = read_tensor_f32((root / kPartsFile).string());
  scene.instances = read_instances((root / kInstancesFile).string());
  if (fs::exists(root / kGroundTruthFile)) {
    scene.gt = read_labelmap_png((root / kGroundTruthFile).string());
  }
  if (fs::exists(root / kSpecFile)) scene.spec_json = read_text_file((root / kSpecFile).string());
  return scene;
}

}  // namespace jppf::io
