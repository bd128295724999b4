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

#include "io/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "core/error.hpp"

namespace jppf::io {

namespace {

static_assert(std::endian::native == std::endian::little, "JPPT IO assumes a little-endian host");

constexpr char kMagic[4] = {'J', 'P', 'P', 'T'};
constexpr std::size_t kFixedHeader = 12;

template <typename T>
void put(std::vector<std::uint8_t>& out, T v) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
  out.insert(out.end(), p, p + sizeof(T));
}

template <typename T>
T get(const std::vector<std::uint8_t>& in, std::size_t offset) {
  T v;
  std::memcpy(&v, in.data() + offset, sizeof(T));
  return v;
}

template <typename T>
std::vector<std::uint8_t> encode(const Tensor<T>& t, DType dtype) {
  if (t.data.size() != Tensor<T>::element_count(t.dims)) {
    throw Error(ErrorCode::kShapeMismatch, "tensor payload does not match its dims");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kFixedHeader + 4 * t.dims.size() + sizeof(T) * t.data.size());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put<std::uint16_t>(out, kTensorVersion);
  put<std::uint16_t>(out, static_cast<std::uint16_t>(dtype));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(t.dims.size()));
  for (auto d : t.dims) put<std::uint32_t>(out, d);
  const auto* p = reinterpret_cast<const std::uint8_t*>(t.data.data());
  out.insert(out.end(), p, p + sizeof(T) * t.data.size());
  return out;
}

template <typename T>
Tensor<T> decode_payload(const std::vector<std::uint8_t>& in, std::size_t offset,
                         std::vector<std::uint32_t> dims) {
  Tensor<T> t;
  t.dims = std::move(dims);
  const std::size_t n = Tensor<T>::element_count(t.dims);
  if (in.size() - offset < n * sizeof(T)) {
    throw Error(ErrorCode::kTruncatedPayload, "payload holds " + std::to_string(in.size() - offset) +
                                                  " bytes, expected " + std::to_string(n * sizeof(T)));
  }
  if (in.size() - offset > n * sizeof(T)) {
    throw Error(ErrorCode::kDecodeError, "trailing bytes after tensor payload");
  }
  t.data.resize(n);
  std::memcpy(t.data.data(), in.data() + offset, n * sizeof(T));
  return t;
}

}  // namespace

std::vector<std::uint8_t> encode_tensor(const AnyTensor& t) {
  if (const auto* f = std::get_if<TensorF32>(&t)) return encode(*f, DType::kF32);
  return encode(std::get<TensorU32>(t), DType::kU32);
}

AnyTensor decode_tensor(const std::vector<std::uint8_t>& in) {
  if (in.size() < 4 || std::memcmp(in.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::kBadMagic, "not a JPPT tensor container");
  }
  if (in.size() < kFixedHeader) throw Error(ErrorCode::kTruncatedPayload, "header is truncated");
  const auto version = get<std::uint16_t>(in, 4);
  if (version != kTensorVersion) {
    throw Error(ErrorCode::kUnsupportedVersion, "JPPT version " + std::to_string(version));
  }
  const auto dtype = get<std::uint16_t>(in, 6);
  const auto rank = get<std::uint32_t>(in, 8);
  if (in.size() < kFixedHeader + 4ull * rank) {
    throw Error(ErrorCode::kTruncatedPayload, "dims are truncated");
  }
  std::vector<std::uint32_t> dims(rank);
  for (std::uint32_t i = 0; i < rank; ++i) dims[i] = get<std::uint32_t>(in, kFixedHeader + 4 * i);
  const std::size_t offset = kFixedHeader + 4ull * rank;
  switch (static_cast<DType>(dtype)) {
    case DType::kF32: return decode_payload<float>(in, offset, std::move(dims));
    case DType::kU32: return decode_payload<std::uint32_t>(in, offset, std::move(dims));
  }
  throw Error(ErrorCode::kDecodeError, "unknown dtype code " + std::to_string(dtype));
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path);
}

void write_text_file(const std::string& path, const std::string& text) {
  write_file(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

std::string read_text_file(const std::string& path) {
  auto bytes = read_file(path);
  return {bytes.begin(), bytes.end()};
}

void write_tensor(const AnyTensor& t, const std::string& path) { write_file(path, encode_tensor(t)); }

AnyTensor read_tensor(const std::string& path) { return decode_tensor(read_file(path)); }

TensorF32 read_tensor_f32(const std::string& path) {
  auto t = read_tensor(path);
  if (auto* f = std::get_if<TensorF32>(&t)) return std::move(*f);
  throw Error(ErrorCode::kDecodeError, path + " holds u32 data, expected f32");
}

}  // namespace jppf::io
