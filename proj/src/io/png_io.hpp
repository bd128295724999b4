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
#include <string>
#include <vector>

#include "core/label.hpp"
#include "core/taxonomy.hpp"

namespace jppf::io {

// 16-bit RGB label PNG: R = semantic (high byte always 0), G = instance,
// B = part. VOID is (0, 0, 0).
std::vector<std::uint8_t> encode_labelmap_png(const PanopticPartMap& map);
PanopticPartMap decode_labelmap_png(const std::vector<std::uint8_t>& bytes);
void write_labelmap_png(const PanopticPartMap& map, const std::string& path);
PanopticPartMap read_labelmap_png(const std::string& path);

struct RgbImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> pixels;  // interleaved RGB8
};

// Deterministic visualization: hue per semantic class, brightness per part,
// instance boundaries drawn in a per-instance outline color, VOID black.
RgbImage render(const PanopticPartMap& map, const ClassTaxonomy& t);
std::vector<std::uint8_t> encode_rgb_png(const RgbImage& image);
RgbImage decode_rgb_png(const std::vector<std::uint8_t>& bytes);

}  // namespace jppf::io
