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
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "core/taxonomy.hpp"

namespace jppf {

// Row-major n-dimensional array.
template <typename T>
struct Tensor {
  std::vector<std::uint32_t> dims;
  std::vector<T> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::uint32_t> d)
      : dims(std::move(d)), data(element_count(dims)) {}
  Tensor(std::vector<std::uint32_t> d, std::vector<T> values)
      : dims(std::move(d)), data(std::move(values)) {}

  static std::size_t element_count(const std::vector<std::uint32_t>& d) {
    return std::accumulate(d.begin(), d.end(), std::size_t{1},
                           [](std::size_t a, std::uint32_t b) { return a * b; });
  }

  std::size_t rank() const { return dims.size(); }

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

using TensorF32 = Tensor<float>;
using TensorU32 = Tensor<std::uint32_t>;

// C × H × W activations in [0,1]; channel_meta[c] is the class or part group
// id that channel c scores.
struct DenseLogits {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<float> values;
  std::vector<std::uint32_t> channel_meta;

  std::size_t plane_size() const { return height * width; }
  std::span<const float> plane(std::size_t c) const {
    return {values.data() + c * plane_size(), plane_size()};
  }
  std::span<float> plane(std::size_t c) { return {values.data() + c * plane_size(), plane_size()}; }
  float at(std::size_t c, std::size_t y, std::size_t x) const {
    return values[c * plane_size() + y * width + x];
  }
};

// Shape and range checks against the taxonomy channel layout. Values outside
// [0,1] (or NaN) are rejected with kValueOutOfRange.
DenseLogits make_semantic_logits(const ClassTaxonomy& t, TensorF32 tensor);
DenseLogits make_part_logits(const ClassTaxonomy& t, TensorF32 tensor);
void check_unit_range(std::span<const float> values, const char* what);

TensorF32 to_tensor(const DenseLogits& logits);

}  // namespace jppf
