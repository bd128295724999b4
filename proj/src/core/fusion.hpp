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
#include <span>
#include <vector>

#include "core/instances.hpp"
#include "core/label.hpp"
#include "core/taxonomy.hpp"
#include "core/tensor.hpp"

namespace jppf {

struct FusionConfig {
  std::size_t min_stuff_area = 2048;
  double conf_threshold = 0.5;
  double iou_threshold = 0.5;
  bool per_class_nms = false;
  unsigned threads = 1;

  PreprocessConfig preprocess() const { return {conf_threshold, iou_threshold, per_class_nms}; }
};

enum class LayerSource { kSemantic, kInstance, kPart };

// A read-only view of one activation layer. `values` is row-major with
// `stride` floats per row; values[0] sits at canvas (extent.y0, extent.x0).
struct LayerView {
  LayerSource source = LayerSource::kSemantic;
  const float* values = nullptr;
  std::size_t stride = 0;
  Box extent;

  float at(std::size_t y, std::size_t x) const {
    return values[(y - static_cast<std::size_t>(extent.y0)) * stride +
                  (x - static_cast<std::size_t>(extent.x0))];
  }
};

// Equally shaped H × W layers masked to `region`: every layer reads as 0
// outside it. Layers are views, so replicated semantic and instance layers are
// shared between the part candidates of one instance.
struct MaskedLogitStack {
  std::size_t height = 0;
  std::size_t width = 0;
  Box region;
  std::vector<LayerView> layers;

  float value(std::size_t layer, std::size_t y, std::size_t x) const {
    return region.contains(y, x) ? layers[layer].at(y, x) : 0.0f;
  }
};

// Fused score map. Scores are stored for `region` only; outside it every
// layer is 0 and so is the fused score.
struct FusedMap {
  std::size_t height = 0;
  std::size_t width = 0;
  Box region;
  std::vector<float> scores;

  float value(std::size_t y, std::size_t x) const {
    if (!region.contains(y, x)) return 0.0f;
    return scores[(y - region.y0) * region.width() + (x - region.x0)];
  }
  std::vector<float> dense() const;
};

struct Candidate {
  PanopticPartLabel identity;
  MaskedLogitStack stack;
};

struct FusedCandidate {
  PanopticPartLabel identity;
  FusedMap map;
};

struct CandidateStack {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t num_stuff_channels = 0;
  std::size_t num_things = 0;
  std::size_t num_things_np = 0;
  std::size_t num_things_p = 0;
  // Stuff channels first (taxonomy order), then thing channels by instance id.
  std::vector<PanopticPartLabel> identities;
  std::vector<FusedMap> channels;

  std::size_t size() const { return channels.size(); }
  bool is_thing_channel(std::size_t c) const { return c >= num_stuff_channels; }
};

double sigmoid(double x);

// FL = (Σ σ(l)) · (Σ l) per pixel, accumulated in double in layer order and
// stored as float. Throws kShapeMismatch for empty or inconsistent stacks.
FusedMap fuse_logits(const MaskedLogitStack& stack, unsigned threads = 1);

void check_inputs(const ClassTaxonomy& t, const DenseLogits& semantic, const DenseLogits* parts);

std::vector<Candidate> build_thing_candidates(const CanvasInstance& inst,
                                              const DenseLogits& semantic,
                                              const DenseLogits& parts, const ClassTaxonomy& t);
std::vector<Candidate> build_stuff_candidates(const DenseLogits& semantic,
                                              const DenseLogits& parts, const ClassTaxonomy& t);

CandidateStack assemble(std::vector<FusedCandidate> things, std::vector<FusedCandidate> stuff);

// Σ_stuff max(1, C_{p,s}) + Σ_instances max(1, C_{p,c}).
std::size_t expected_candidate_count(const ClassTaxonomy& t,
                                     std::span<const CanvasInstance> instances);

// Global argmax over all candidates (lowest channel wins ties; thing channels
// compete only inside their box). A thing winner writes its identity; a stuff
// winner writes the stuff argmax of `semantic`. Stuff regions (4-connected,
// per class) smaller than cfg.min_stuff_area become VOID.
PanopticPartMap resolve(const CandidateStack& stack, const DenseLogits& semantic,
                        const FusionConfig& cfg, const ClassTaxonomy& t);

void filter_small_stuff(PanopticPartMap& map, const ClassTaxonomy& t, std::size_t min_area);

struct FusionResult {
  std::vector<CanvasInstance> instances;
  CandidateStack candidates;
  PanopticPartMap map;
};

FusionResult run_jppf(const DenseLogits& semantic, const DenseLogits& parts,
                      std::vector<InstancePrediction> raw, const FusionConfig& cfg,
                      const ClassTaxonomy& t);
PanopticPartMap jppf_pipeline(const DenseLogits& semantic, const DenseLogits& parts,
                              std::vector<InstancePrediction> raw, const FusionConfig& cfg,
                              const ClassTaxonomy& t);

// Fusion from pre-processed instances (skips filter/paste/NMS).
FusionResult fuse_canvas_instances(const DenseLogits& semantic, const DenseLogits& parts,
                                   std::vector<CanvasInstance> instances,
                                   const FusionConfig& cfg, const ClassTaxonomy& t);

// Two-head variant: things fuse {semantic, instance}, stuff channels pass the
// semantic layer alone through the same operation. Output parts are all 0.
PanopticPartMap panoptic_fuse(const DenseLogits& semantic, std::vector<InstancePrediction> raw,
                              const FusionConfig& cfg, const ClassTaxonomy& t);
PanopticPartMap panoptic_fuse_canvas(const DenseLogits& semantic,
                                     std::span<const CanvasInstance> instances,
                                     const FusionConfig& cfg, const ClassTaxonomy& t);

}  // namespace jppf
