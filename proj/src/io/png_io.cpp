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

#include "io/png_io.hpp"

#include <png.h>

#include <cmath>
#include <csetjmp>
#include <cstring>

#include "core/error.hpp"
#include "io/tensor_io.hpp"

namespace jppf::io {

namespace {

struct WriteSink {
  std::vector<std::uint8_t>* out;
};

struct ReadSource {
  const std::vector<std::uint8_t>* in;
  std::size_t offset;
};

struct ErrorSlot {
  char message[256];
};

void on_error(png_structp png, png_const_charp msg) {
  auto* slot = static_cast<ErrorSlot*>(png_get_error_ptr(png));
  std::snprintf(slot->message, sizeof(slot->message), "%s", msg);
  png_longjmp(png, 1);
}

void on_warning(png_structp, png_const_charp) {}

void write_bytes(png_structp png, png_bytep data, png_size_t length) {
  auto* sink = static_cast<WriteSink*>(png_get_io_ptr(png));
  sink->out->insert(sink->out->end(), data, data + length);
}

void flush_bytes(png_structp) {}

void read_bytes(png_structp png, png_bytep data, png_size_t length) {
  auto* src = static_cast<ReadSource*>(png_get_io_ptr(png));
  if (src->in->size() - src->offset < length) png_error(png, "unexpected end of PNG data");
  std::memcpy(data, src->in->data() + src->offset, length);
  src->offset += length;
}

// Rows are already in PNG byte order (big-endian for 16-bit samples).
std::vector<std::uint8_t> encode_png(std::size_t height, std::size_t width, int bit_depth,
                                     const std::vector<std::uint8_t>& raw) {
  std::vector<std::uint8_t> out;
  WriteSink sink{&out};
  ErrorSlot err{};
  const std::size_t row_bytes = width * 3 * static_cast<std::size_t>(bit_depth / 8);
  std::vector<png_bytep> rows(height);
  for (std::size_t y = 0; y < height; ++y) {
    rows[y] = const_cast<png_bytep>(raw.data() + y * row_bytes);
  }

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, on_error, on_warning);
  if (png == nullptr) throw Error(ErrorCode::kInternal, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::kInternal, std::string("PNG encode failed: ") + err.message);
  }
  png_set_write_fn(png, &sink, write_bytes, flush_bytes);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
               bit_depth, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

struct DecodedPng {
  std::size_t height = 0;
  std::size_t width = 0;
  int bit_depth = 0;
  int color_type = 0;
  std::vector<std::uint8_t> raw;
};

DecodedPng decode_png(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    throw Error(ErrorCode::kDecodeError, "not a PNG file");
  }
  DecodedPng result;
  ReadSource src{&bytes, 0};
  ErrorSlot err{};
  std::vector<png_bytep> rows;

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, on_error, on_warning);
  if (png == nullptr) throw Error(ErrorCode::kInternal, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::kDecodeError, std::string("PNG decode failed: ") + err.message);
  }
  png_set_read_fn(png, &src, read_bytes);
  png_read_info(png, info);
  result.width = png_get_image_width(png, info);
  result.height = png_get_image_height(png, info);
  result.bit_depth = png_get_bit_depth(png, info);
  result.color_type = png_get_color_type(png, info);
  if (result.color_type != PNG_COLOR_TYPE_RGB || (result.bit_depth != 8 && result.bit_depth != 16) ||
      png_get_interlace_type(png, info) != PNG_INTERLACE_NONE) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::kDecodeError, "expected a non-interlaced 8- or 16-bit RGB PNG");
  }
  const std::size_t row_bytes = png_get_rowbytes(png, info);
  result.raw.resize(row_bytes * result.height);
  rows.resize(result.height);
  for (std::size_t y = 0; y < result.height; ++y) rows[y] = result.raw.data() + y * row_bytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return result;
}

void put16(std::uint8_t* p, std::uint32_t v) {
  p[0] = static_cast<std::uint8_t>(v >> 8);
  p[1] = static_cast<std::uint8_t>(v & 0xFF);
}

std::uint32_t get16(const std::uint8_t* p) { return (static_cast<std::uint32_t>(p[0]) << 8) | p[1]; }

}  // namespace

std::vector<std::uint8_t> encode_labelmap_png(const PanopticPartMap& map) {
  if (map.size() == 0) throw Error(ErrorCode::kInvalidArgument, "cannot encode an empty map");
  std::vector<std::uint8_t> raw(map.size() * 6);
  for (std::size_t i = 0; i < map.size(); ++i) {
    const auto& l = map[i];
    encode_label(l);  // throws kFieldOverflow
    std::uint8_t* px = raw.data() + i * 6;
    put16(px, l.semantic);
    put16(px + 2, l.instance);
    put16(px + 4, l.part);
  }
  return encode_png(map.height(), map.width(), 16, raw);
}

PanopticPartMap decode_labelmap_png(const std::vector<std::uint8_t>& bytes) {
  DecodedPng img = decode_png(bytes);
  if (img.bit_depth != 16) throw Error(ErrorCode::kDecodeError, "label maps must be 16-bit RGB");
  PanopticPartMap map(img.height, img.width);
  for (std::size_t i = 0; i < map.size(); ++i) {
    const std::uint8_t* px = img.raw.data() + i * 6;
    PanopticPartLabel l{get16(px), get16(px + 2), get16(px + 4)};
    if (l.semantic > kMaxSemantic || l.part > kMaxPart) {
      throw Error(ErrorCode::kDecodeError, "label PNG channel exceeds its 8-bit budget");
    }
    map[i] = l;
  }
  return map;
}

void write_labelmap_png(const PanopticPartMap& map, const std::string& path) {
  write_file(path, encode_labelmap_png(map));
}

PanopticPartMap read_labelmap_png(const std::string& path) {
  return decode_labelmap_png(read_file(path));
}

namespace {

struct Rgb {
  std::uint8_t r, g, b;
};

Rgb hsv(double h, double s, double v) {
  h = h - std::floor(h);
  const double c = v * s;
  const double hp = h * 6.0;
  const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(hp) % 6) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  const double m = v - c;
  auto q = [m](double u) { return static_cast<std::uint8_t>(std::lround((u + m) * 255.0)); };
  return {q(r), q(g), q(b)};
}

constexpr double kGolden = 0.618033988749895;

}  // namespace

RgbImage render(const PanopticPartMap& map, const ClassTaxonomy& t) {
  RgbImage img{map.height(), map.width(), std::vector<std::uint8_t>(map.size() * 3, 0)};
  const std::size_t w = map.width();
  for (std::size_t i = 0; i < map.size(); ++i) {
    const auto& l = map[i];
    if (l.is_void()) continue;
    const double hue = kGolden * static_cast<double>(t.semantic_channel(l.semantic).value_or(l.semantic));
    Rgb c;
    const std::size_t y = i / w;
    const std::size_t x = i % w;
    bool boundary = false;
    if (l.instance != 0) {
      auto differs = [&](std::size_t j) {
        return map[j].semantic != l.semantic || map[j].instance != l.instance;
      };
      boundary = (x == 0 || differs(i - 1)) || (x + 1 == w || differs(i + 1)) ||
                 (y == 0 || differs(i - w)) || (y + 1 == map.height() || differs(i + w));
    }
    if (boundary) {
      c = hsv(hue + 0.5 + kGolden * l.instance, 0.35, 1.0);
    } else {
      const std::size_t nparts = std::max<std::size_t>(1, t.class_parts(l.semantic).size());
      const double value = l.part == 0 ? 0.85 : 0.35 + 0.6 * static_cast<double>(l.part) / static_cast<double>(nparts);
      c = hsv(hue, 0.75, value);
    }
    img.pixels[i * 3] = c.r;
    img.pixels[i * 3 + 1] = c.g;
    img.pixels[i * 3 + 2] = c.b;
  }
  return img;
}

std::vector<std::uint8_t> encode_rgb_png(const RgbImage& image) {
  if (image.pixels.size() != image.height * image.width * 3 || image.pixels.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "RGB image buffer does not match its size");
  }
  return encode_png(image.height, image.width, 8, image.pixels);
}

RgbImage decode_rgb_png(const std::vector<std::uint8_t>& bytes) {
  DecodedPng img = decode_png(bytes);
  if (img.bit_depth != 8) throw Error(ErrorCode::kDecodeError, "expected an 8-bit RGB PNG");
  return {img.height, img.width, std::move(img.raw)};
}

}  // namespace jppf::io
