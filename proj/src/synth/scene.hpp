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
#include <cstdint>
#include <string>
#include <vector>

#include "core/fusion.hpp"
#include "core/instances.hpp"
#include "core/label.hpp"
#include "core/taxonomy.hpp"
#include "core/tensor.hpp"

namespace jppf::synth {

struct ThingSpec {
  ClassId class_id = 0;
  Box box;
};

struct NoiseModel {
  double temperature = 0.05;  // softmax temperature applied to one-hot logits
  double flip_prob = 0.0;     // per-pixel probability of a wrong class / part / mask value
  double logit_noise = 0.0;   // std-dev of Gaussian noise added before the softmax
  double confidence_jitter = 0.0;
};

// Things are ellipses inscribed in their boxes, drawn in list order (later
// things occlude earlier ones). Parts of partitionable things are horizontal
// bands over class_parts. Stuff is `num_stuff_regions` vertical stripes.
struct SceneSpec {
  std::size_t height = 32;
  std::size_t width = 32;
  std::uint64_t seed = 0;
  std::size_t num_stuff_regions = 2;
  std::vector<ThingSpec> things;
  NoiseModel noise;
  // Shifts part boundaries of things in the part logits only: < 0 erodes
  // the part masks by that many pixels, > 0 dilates them.
  int part_boundary_shift = 0;
};

struct Scene {
  PanopticPartMap gt;
  DenseLogits semantic;
  DenseLogits parts;
  std::vector<InstancePrediction> instances;
};

// Throws Error(kInvalidSpec).
void check_spec(const SceneSpec& spec, const ClassTaxonomy& t);

// Pure function of (spec, taxonomy); the seed lives in the spec.
Scene generate(const SceneSpec& spec, const ClassTaxonomy& t);

// Random spec with pairwise box IoU <= 0.3 so NMS at 0.5 keeps every thing.
SceneSpec random_spec(const ClassTaxonomy& t, std::uint64_t seed, std::size_t height,
                      std::size_t width, std::size_t max_things, bool noisy);

// Scenes whose part logits are eroded around object contours (every tenth
// member is left clean).
std::vector<SceneSpec> conflict_suite(std::size_t n, std::uint64_t seed, const ClassTaxonomy& t,
                                      std::size_t height = 64, std::size_t width = 64);

// Small random taxonomy: 1-4 stuff, 0-4 things, 1-5 part groups.
ClassTaxonomy random_taxonomy(std::uint64_t seed, bool allow_partitionable_stuff = false);

std::string spec_to_json(const SceneSpec& spec);
SceneSpec spec_from_json(const std::string& text);

// Naive per-pixel reference for the fusion: every candidate label is
// enumerated and scored scalar by scalar. Shares no code with the engine.
PanopticPartMap oracle_fuse(const DenseLogits& semantic, const DenseLogits& parts,
                            const std::vector<CanvasInstance>& instances, const FusionConfig& cfg,
                            const ClassTaxonomy& t);

}  // namespace jppf::synth
