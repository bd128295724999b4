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
#include <variant>
#include <vector>

#include "core/tensor.hpp"

namespace jppf::io {

// JPPT container, all integers little-endian:
//   offset 0  char[4]  magic "JPPT"
//   offset 4  u16      version (1)
//   offset 6  u16      dtype (1 = f32, 2 = u32)
//   offset 8  u32      rank
//   offset 12 u32[rank] dims
//   then      product(dims) elements, row-major
inline constexpr std::uint16_t kTensorVersion = 1;

enum class DType : std::uint16_t { kF32 = 1, kU32 = 2 };

using AnyTensor = std::variant<TensorF32, TensorU32>;

std::vector<std::uint8_t> encode_tensor(const AnyTensor& t);
AnyTensor decode_tensor(const std::vector<std::uint8_t>& bytes);

void write_tensor(const AnyTensor& t, const std::string& path);
AnyTensor read_tensor(const std::string& path);

// Throws kDecodeError when the file holds the other dtype.
TensorF32 read_tensor_f32(const std::string& path);

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace jppf::io
