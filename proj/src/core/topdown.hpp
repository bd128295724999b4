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

#include <cstdint>
#include <vector>

#include "core/label.hpp"
#include "core/taxonomy.hpp"
#include "core/tensor.hpp"

namespace jppf {

// Per-pixel grouped part map: each value is a part channel index, i.e. an
// index into ClassTaxonomy::part_groups() (0 = background).
struct PartGroupMap {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint32_t> channels;
};

// Argmax over part channels; ties pick the lowest channel.
PartGroupMap part_argmax(const DenseLogits& parts);

// Baseline that trusts the panoptic map (parts of `pan` are ignored) and
// overlays the part map. Partitionable pixels whose part group is background
// or belongs to another class become VOID.
PanopticPartMap merge_top_down(const PanopticPartMap& pan, const PartGroupMap& parts,
                               const ClassTaxonomy& t);

}  // namespace jppf
