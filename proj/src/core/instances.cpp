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

#include "core/instances.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/error.hpp"
#include "core/tensor.hpp"

namespace jppf {

double box_iou(const Box& a, const Box& b) {
  long long iw = std::max(0, std::min(a.x1, b.x1) - std::max(a.x0, b.x0));
  long long ih = std::max(0, std::min(a.y1, b.y1) - std::max(a.y0, b.y0));
  long long inter = iw * ih;
  long long uni = a.area() + b.area() - inter;
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

std::vector<float> CanvasInstance::full_canvas() const {
  std::vector<float> out(canvas_height * canvas_width, 0.0f);
  for (int y = box.y0; y < box.y1; ++y) {
    std::copy_n(box_mask.begin() + static_cast<std::ptrdiff_t>(y - box.y0) * box.width(),
                box.width(), out.begin() + static_cast<std::ptrdiff_t>(y) * canvas_width + box.x0);
  }
  return out;
}

void check_instance(const InstancePrediction& p, std::size_t height, std::size_t width) {
  const Box& b = p.box;
  if (b.x0 < 0 || b.y0 < 0 || b.x0 >= b.x1 || b.y0 >= b.y1 ||
      static_cast<std::size_t>(b.x1) > width || static_cast<std::size_t>(b.y1) > height) {
    throw Error(ErrorCode::kBoxOutOfCanvas,
                "box [" + std::to_string(b.x0) + "," + std::to_string(b.y0) + "," +
                    std::to_string(b.x1) + "," + std::to_string(b.y1) + "] not inside " +
                    std::to_string(width) + "x" + std::to_string(height) + " canvas");
  }
  if (p.mask_height == 0 || p.mask_width == 0 || p.mask.size() != p.mask_height * p.mask_width) {
    throw Error(ErrorCode::kShapeMismatch, "instance mask size does not match its dims");
  }
  if (!(p.confidence >= 0.0 && p.confidence <= 1.0)) {
    throw Error(ErrorCode::kValueOutOfRange, "instance confidence outside [0,1]");
  }
  check_unit_range(p.mask, "instance mask");
}

std::vector<InstancePrediction> filter_and_sort(std::vector<InstancePrediction> preds,
                                                double conf_threshold) {
  if (!(conf_threshold >= 0.0 && conf_threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "confidence threshold outside [0,1]");
  }
  std::erase_if(preds, [&](const InstancePrediction& p) { return p.confidence < conf_threshold; });
  std::stable_sort(preds.begin(), preds.end(),
                   [](const InstancePrediction& a, const InstancePrediction& b) {
                     return a.confidence > b.confidence;
                   });
  return preds;
}

namespace {

struct Tap {
  std::size_t lo;
  std::size_t hi;
  double frac;
};

// Source sample position for destination index `i` with half-pixel centers.
Tap bilinear_tap(std::size_t i, std::size_t src, std::size_t dst) {
  double pos = (static_cast<double>(i) + 0.5) * static_cast<double>(src) / static_cast<double>(dst) - 0.5;
  pos = std::clamp(pos, 0.0, static_cast<double>(src - 1));
  auto lo = static_cast<std::size_t>(std::floor(pos));
  std::size_t hi = std::min(lo + 1, src - 1);
  return {lo, hi, pos - static_cast<double>(lo)};
}

}  // namespace

CanvasInstance paste_mask(const InstancePrediction& p, std::size_t height, std::size_t width) {
  check_instance(p, height, width);
  CanvasInstance out;
  out.canvas_height = height;
  out.canvas_width = width;
  out.box = p.box;
  out.class_id = p.class_id;
  out.confidence = p.confidence;

  const auto bh = static_cast<std::size_t>(p.box.height());
  const auto bw = static_cast<std::size_t>(p.box.width());
  out.box_mask.resize(bh * bw);

  std::vector<Tap> xtaps(bw);
  for (std::size_t x = 0; x < bw; ++x) xtaps[x] = bilinear_tap(x, p.mask_width, bw);

  for (std::size_t y = 0; y < bh; ++y) {
    Tap ty = bilinear_tap(y, p.mask_height, bh);
    const float* row0 = p.mask.data() + ty.lo * p.mask_width;
    const float* row1 = p.mask.data() + ty.hi * p.mask_width;
    for (std::size_t x = 0; x < bw; ++x) {
      const Tap& tx = xtaps[x];
      double top = row0[tx.lo] * (1.0 - tx.frac) + row0[tx.hi] * tx.frac;
      double bottom = row1[tx.lo] * (1.0 - tx.frac) + row1[tx.hi] * tx.frac;
      double v = top * (1.0 - ty.frac) + bottom * ty.frac;
      out.box_mask[y * bw + x] = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  }
  return out;
}

std::vector<CanvasInstance> overlap_nms(std::vector<CanvasInstance> sorted, double iou_threshold,
                                        bool per_class) {
  std::vector<CanvasInstance> kept;
  kept.reserve(sorted.size());
  for (auto& cand : sorted) {
    bool suppressed = false;
    for (const auto& k : kept) {
      if (per_class && k.class_id != cand.class_id) continue;
      if (box_iou(k.box, cand.box) > iou_threshold) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(std::move(cand));
  }
  if (kept.size() > kMaxInstance) {
    throw Error(ErrorCode::kFieldOverflow, "more than 65535 instances survive NMS");
  }
  for (std::size_t i = 0; i < kept.size(); ++i) kept[i].id = static_cast<InstanceId>(i + 1);
  return kept;
}

std::vector<CanvasInstance> preprocess_instances(const ClassTaxonomy& t,
                                                 std::vector<InstancePrediction> preds,
                                                 std::size_t height, std::size_t width,
                                                 const PreprocessConfig& cfg) {
  for (const auto& p : preds) {
    if (!t.is_thing(p.class_id)) {
      throw Error(ErrorCode::kNotAThingClass,
                  "instance class " + std::to_string(p.class_id) + " is not a thing class");
    }
    check_instance(p, height, width);
  }
  auto sorted = filter_and_sort(std::move(preds), cfg.conf_threshold);
  std::vector<CanvasInstance> pasted;
  pasted.reserve(sorted.size());
  for (const auto& p : sorted) pasted.push_back(paste_mask(p, height, width));
  return overlap_nms(std::move(pasted), cfg.iou_threshold, cfg.per_class_nms);
}

}  // namespace jppf
