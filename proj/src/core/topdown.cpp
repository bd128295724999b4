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

#include "core/topdown.hpp"

#include <string>

#include "core/error.hpp"

namespace jppf {

PartGroupMap part_argmax(const DenseLogits& parts) {
  PartGroupMap out{parts.height, parts.width, std::vector<std::uint32_t>(parts.plane_size(), 0)};
  std::vector<float> best(parts.plane_size(), -1.0f);
  for (std::size_t c = 0; c < parts.channels; ++c) {
    auto plane = parts.plane(c);
    for (std::size_t i = 0; i < plane.size(); ++i) {
      if (plane[i] > best[i]) {
        best[i] = plane[i];
        out.channels[i] = static_cast<std::uint32_t>(c);
      }
    }
  }
  return out;
}

PanopticPartMap merge_top_down(const PanopticPartMap& pan, const PartGroupMap& parts,
                               const ClassTaxonomy& t) {
  if (pan.height() != parts.height || pan.width() != parts.width ||
      parts.channels.size() != pan.size()) {
    throw Error(ErrorCode::kShapeMismatch, "panoptic and part maps differ in shape");
  }
  for (std::uint32_t c : parts.channels) {
    if (c >= t.num_part_channels()) {
      throw Error(ErrorCode::kValueOutOfRange, "part map value " + std::to_string(c) +
                                                   " is not a part channel");
    }
  }
  PanopticPartMap out(pan.height(), pan.width());
  for (std::size_t i = 0; i < pan.size(); ++i) {
    const PanopticPartLabel& p = pan[i];
    if (p.is_void()) continue;
    auto class_parts = t.class_parts(p.semantic);
    if (class_parts.empty()) {
      out[i] = {p.semantic, p.instance, 0};
      continue;
    }
    const std::uint32_t channel = parts.channels[i];
    if (channel == 0) continue;
    const PartGroupId group = t.part_groups()[channel].id;
    for (std::size_t k = 0; k < class_parts.size(); ++k) {
      if (class_parts[k] == group) {
        out[i] = {p.semantic, p.instance, static_cast<PartId>(k + 1)};
        break;
      }
    }
  }
  return out;
}

}  // namespace jppf
