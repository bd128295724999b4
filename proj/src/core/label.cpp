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

#include "core/label.hpp"

#include "core/error.hpp"

namespace jppf {

std::uint32_t encode_label(const PanopticPartLabel& l) {
  if (l.semantic > kMaxSemantic || l.instance > kMaxInstance || l.part > kMaxPart) {
    throw Error(ErrorCode::kFieldOverflow,
                "label (" + std::to_string(l.semantic) + ", " + std::to_string(l.instance) + ", " +
                    std::to_string(l.part) + ") exceeds the 8/16/8 bit budget");
  }
  return (l.semantic << 24) | (l.instance << 8) | l.part;
}

std::optional<std::string> label_violation(const ClassTaxonomy& t, const PanopticPartLabel& l) {
  if (l.is_void()) return std::nullopt;
  if (l.semantic > kMaxSemantic || l.instance > kMaxInstance || l.part > kMaxPart) {
    return "field exceeds encoding budget";
  }
  ClassKind kind = t.kind(l.semantic);
  if (kind == ClassKind::kUnknown) {
    return "semantic class " + std::to_string(l.semantic) + " is not declared";
  }
  if (l.instance != 0 && kind != ClassKind::kThing) {
    return "instance id on non-thing class " + std::to_string(l.semantic);
  }
  if (l.part != 0) {
    auto parts = t.class_parts(l.semantic);
    if (parts.empty()) return "part label on non-partitionable class " + std::to_string(l.semantic);
    if (l.part > parts.size()) {
      return "part " + std::to_string(l.part) + " out of range for class " +
             std::to_string(l.semantic);
    }
  }
  return std::nullopt;
}

std::vector<MapViolation> validate_map(const ClassTaxonomy& t, const PanopticPartMap& map,
                                       std::size_t limit) {
  std::vector<MapViolation> out;
  for (std::size_t y = 0; y < map.height() && out.size() < limit; ++y) {
    for (std::size_t x = 0; x < map.width() && out.size() < limit; ++x) {
      if (auto v = label_violation(t, map.at(y, x))) out.push_back({y, x, std::move(*v)});
    }
  }
  return out;
}

}  // namespace jppf
