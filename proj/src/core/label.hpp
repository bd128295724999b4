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
#include <optional>
#include <string>
#include <vector>

#include "core/taxonomy.hpp"

namespace jppf {

using InstanceId = std::uint32_t;

// Per-pixel (semantic, instance, part) triple. VOID is the all-zero label;
// class id 0 is reserved so no valid label collides with it.
struct PanopticPartLabel {
  ClassId semantic = 0;
  InstanceId instance = 0;
  PartId part = 0;

  static constexpr PanopticPartLabel void_label() { return {}; }
  constexpr bool is_void() const { return semantic == 0 && instance == 0 && part == 0; }

  friend constexpr bool operator==(const PanopticPartLabel&, const PanopticPartLabel&) = default;
};

// Bit layout: [31:24] semantic, [23:8] instance, [7:0] part.
inline constexpr std::uint32_t kMaxSemantic = 0xFF;
inline constexpr std::uint32_t kMaxInstance = 0xFFFF;
inline constexpr std::uint32_t kMaxPart = 0xFF;

std::uint32_t encode_label(const PanopticPartLabel& l);
constexpr PanopticPartLabel decode_label(std::uint32_t v) {
  return {v >> 24, (v >> 8) & 0xFFFFu, v & 0xFFu};
}

// Returns a description of the first broken rule, or nullopt when `l` is VOID
// or a consistent label under `t`.
std::optional<std::string> label_violation(const ClassTaxonomy& t, const PanopticPartLabel& l);

class PanopticPartMap {
 public:
  PanopticPartMap() = default;
  PanopticPartMap(std::size_t height, std::size_t width)
      : height_(height), width_(width), labels_(height * width) {}

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t size() const { return labels_.size(); }

  PanopticPartLabel& at(std::size_t y, std::size_t x) { return labels_[y * width_ + x]; }
  const PanopticPartLabel& at(std::size_t y, std::size_t x) const { return labels_[y * width_ + x]; }
  PanopticPartLabel& operator[](std::size_t i) { return labels_[i]; }
  const PanopticPartLabel& operator[](std::size_t i) const { return labels_[i]; }

  const std::vector<PanopticPartLabel>& labels() const { return labels_; }

  friend bool operator==(const PanopticPartMap&, const PanopticPartMap&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<PanopticPartLabel> labels_;
};

struct MapViolation {
  std::size_t y = 0;
  std::size_t x = 0;
  std::string rule;
};

// At most `limit` violations are collected.
std::vector<MapViolation> validate_map(const ClassTaxonomy& t, const PanopticPartMap& map,
                                       std::size_t limit = 16);

}  // namespace jppf
