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

#include <cstddef>
#include <vector>

#include "core/label.hpp"
#include "core/taxonomy.hpp"

namespace jppf {

// Half-open pixel box [x0, x1) × [y0, y1) in canvas coordinates.
struct Box {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  long long area() const { return static_cast<long long>(width()) * height(); }
  bool contains(std::size_t y, std::size_t x) const {
    return static_cast<long long>(x) >= x0 && static_cast<long long>(x) < x1 &&
           static_cast<long long>(y) >= y0 && static_cast<long long>(y) < y1;
  }

  friend bool operator==(const Box&, const Box&) = default;
};

double box_iou(const Box& a, const Box& b);

struct InstancePrediction {
  std::size_t mask_height = 0;
  std::size_t mask_width = 0;
  std::vector<float> mask;  // mask_height × mask_width, values in [0,1]
  Box box;
  ClassId class_id = 0;
  double confidence = 0.0;
};

// An instance mask resized into canvas space. Values are stored for the box
// only; every pixel outside the box reads as exactly 0.
struct CanvasInstance {
  std::size_t canvas_height = 0;
  std::size_t canvas_width = 0;
  Box box;
  std::vector<float> box_mask;  // box.height() × box.width()
  ClassId class_id = 0;
  double confidence = 0.0;
  InstanceId id = 0;

  float value(std::size_t y, std::size_t x) const {
    if (!box.contains(y, x)) return 0.0f;
    return box_mask[(y - box.y0) * box.width() + (x - box.x0)];
  }
  std::vector<float> full_canvas() const;
};

struct PreprocessConfig {
  double conf_threshold = 0.5;
  double iou_threshold = 0.5;
  bool per_class_nms = false;
};

// Throws kBoxOutOfCanvas / kValueOutOfRange / kShapeMismatch.
void check_instance(const InstancePrediction& p, std::size_t height, std::size_t width);

// Keeps confidence >= threshold, sorted by descending confidence; ties keep
// input order.
std::vector<InstancePrediction> filter_and_sort(std::vector<InstancePrediction> preds,
                                                double conf_threshold);

// Bilinear resize (half-pixel centers, edge clamped) of the mask to the box
// extent. The result has id 0 until NMS assigns one.
CanvasInstance paste_mask(const InstancePrediction& p, std::size_t height, std::size_t width);

// Greedy suppression over a confidence-sorted list: an instance is dropped iff
// its box IoU with an already kept instance is strictly above the threshold.
// Survivors keep order and receive ids 1..N.
std::vector<CanvasInstance> overlap_nms(std::vector<CanvasInstance> sorted, double iou_threshold,
                                        bool per_class = false);

// filter_and_sort -> paste_mask -> overlap_nms. Also rejects non-thing classes.
std::vector<CanvasInstance> preprocess_instances(const ClassTaxonomy& t,
                                                 std::vector<InstancePrediction> preds,
                                                 std::size_t height, std::size_t width,
                                                 const PreprocessConfig& cfg);

}  // namespace jppf
