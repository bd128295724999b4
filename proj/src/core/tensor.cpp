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

#include "core/tensor.hpp"

#include <string>

#include "core/error.hpp"

namespace jppf {

void check_unit_range(std::span<const float> values, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    float v = values[i];
    if (!(v >= 0.0f && v <= 1.0f)) {
      throw Error(ErrorCode::kValueOutOfRange, std::string(what) + " value " + std::to_string(v) +
                                                   " at flat index " + std::to_string(i) +
                                                   " is outside [0,1]");
    }
  }
}

namespace {

DenseLogits make_logits(TensorF32 tensor, std::size_t expected_channels,
                        std::vector<std::uint32_t> meta, const char* what) {
  if (tensor.rank() != 3) {
    throw Error(ErrorCode::kShapeMismatch, std::string(what) + " logits must be rank 3 (C x H x W)");
  }
  if (tensor.dims[0] != expected_channels) {
    throw Error(ErrorCode::kShapeMismatch, std::string(what) + " logits have " +
                                               std::to_string(tensor.dims[0]) +
                                               " channels, taxonomy expects " +
                                               std::to_string(expected_channels));
  }
  if (tensor.data.size() != TensorF32::element_count(tensor.dims)) {
    throw Error(ErrorCode::kShapeMismatch, std::string(what) + " payload does not match dims");
  }
  check_unit_range(tensor.data, what);
  DenseLogits out;
  out.channels = tensor.dims[0];
  out.height = tensor.dims[1];
  out.width = tensor.dims[2];
  out.values = std::move(tensor.data);
  out.channel_meta = std::move(meta);
  return out;
}

}  // namespace

DenseLogits make_semantic_logits(const ClassTaxonomy& t, TensorF32 tensor) {
  std::vector<std::uint32_t> meta;
  for (const auto& c : t.stuff()) meta.push_back(c.id);
  for (const auto& c : t.things()) meta.push_back(c.id);
  return make_logits(std::move(tensor), t.num_semantic_channels(), std::move(meta), "semantic");
}

DenseLogits make_part_logits(const ClassTaxonomy& t, TensorF32 tensor) {
  if (t.num_part_channels() == 0) {
    throw Error(ErrorCode::kMissingBackgroundChannel, "taxonomy declares no part background group");
  }
  std::vector<std::uint32_t> meta;
  for (const auto& g : t.part_groups()) meta.push_back(g.id);
  return make_logits(std::move(tensor), t.num_part_channels(), std::move(meta), "part");
}

TensorF32 to_tensor(const DenseLogits& logits) {
  return TensorF32({static_cast<std::uint32_t>(logits.channels),
                    static_cast<std::uint32_t>(logits.height),
                    static_cast<std::uint32_t>(logits.width)},
                   logits.values);
}

}  // namespace jppf
