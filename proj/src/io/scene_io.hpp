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

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/instances.hpp"
#include "core/label.hpp"
#include "core/tensor.hpp"

namespace jppf::io {

// Instance prediction file: JSON array of
//   {"box": [x0, y0, x1, y1], "class_id": c, "confidence": f,
//    "mask": {"h": H_I, "w": W_I, "tensor_ref": "masks/instance_000.jppt"}}
// tensor_ref is relative to the JSON file and names an f32 [h, w] tensor.
// Fractional boxes are snapped outward (floor x0/y0, ceil x1/y1).
std::vector<InstancePrediction> read_instances(const std::string& path);
void write_instances(const std::vector<InstancePrediction>& preds, const std::string& path);

// Scene directory layout:
//   semantic.jppt   f32 [C_st + C_th, H, W]
//   parts.jppt      f32 [C_p + 1, H, W]
//   instances.json  (masks/ holds the referenced mask tensors)
//   gt.png          optional 16-bit label map
//   spec.json       optional generator spec
struct SceneData {
  TensorF32 semantic;
  TensorF32 parts;
  std::vector<InstancePrediction> instances;
  std::optional<PanopticPartMap> gt;
  std::optional<std::string> spec_json;
};

inline constexpr const char* kSemanticFile = "semantic.jppt";
inline constexpr const char* kPartsFile = "parts.jppt";
inline constexpr const char* kInstancesFile = "instances.json";
inline constexpr const char* kGroundTruthFile = "gt.png";
inline constexpr const char* kSpecFile = "spec.json";

void write_scene(const SceneData& scene, const std::string& dir);
SceneData read_scene(const std::string& dir);

}  // namespace jppf::io
