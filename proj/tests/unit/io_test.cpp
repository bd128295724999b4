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

#include <array>
#include <cstring>
#include <filesystem>
#include <functional>
#include <random>

#include <unistd.h>

#include <gtest/gtest.h>

#include "core/error.hpp"
#include "io/png_io.hpp"
#include "io/scene_io.hpp"
#include "io/tensor_io.hpp"
#include "synth/scene.hpp"
#include "test_util.hpp"

namespace jppf {
namespace {

namespace fs = std::filesystem;
using testing::fixture;
using testing::full_mask;
using testing::tiny_taxonomy;

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("jppf_io_test_" + std::to_string(::getpid())) / name;
  fs::create_directories(p.parent_path());
  return p;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

TEST(TensorIo, RandomF32RoundTripIsBitExact) {
  std::mt19937_64 rng(1);
  TensorF32 t({3, 5, 7});
  for (auto& v : t.data) {
    const std::uint32_t bits = static_cast<std::uint32_t>(rng());
    std::memcpy(&v, &bits, sizeof v);
  }
  const auto path = scratch("t.jppt").string();
  io::write_tensor(t, path);
  auto back = io::read_tensor(path);
  const auto& f = std::get<TensorF32>(back);
  EXPECT_EQ(f.dims, t.dims);
  EXPECT_EQ(std::memcmp(f.data.data(), t.data.data(), t.data.size() * sizeof(float)), 0);
}

TEST(TensorIo, U32RoundTripAndLayout) {
  TensorU32 t({2, 2}, {1, 2, 3, 0xDEADBEEF});
  auto bytes = io::encode_tensor(t);
  ASSERT_EQ(bytes.size(), 4u + 2 + 2 + 4 + 8 + 16);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "JPPT");
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[6], 2);
  EXPECT_EQ(bytes[8], 2);
  EXPECT_EQ(bytes[bytes.size() - 1], 0xDE);
  EXPECT_EQ(std::get<TensorU32>(io::decode_tensor(bytes)), t);
}

TEST(TensorIo, Errors) {
  auto bytes = io::encode_tensor(TensorF32({2, 2}, {0, 1, 2, 3}));
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_EQ(code_of([&] { io::decode_tensor(bad_magic); }), ErrorCode::kBadMagic);
  auto bad_version = bytes;
  bad_version[4] = 9;
  EXPECT_EQ(code_of([&] { io::decode_tensor(bad_version); }), ErrorCode::kUnsupportedVersion);
  auto truncated = bytes;
  truncated.resize(truncated.size() - 1);
  EXPECT_EQ(code_of([&] { io::decode_tensor(truncated); }), ErrorCode::kTruncatedPayload);
  auto header_only = bytes;
  header_only.resize(10);
  EXPECT_EQ(code_of([&] { io::decode_tensor(header_only); }), ErrorCode::kTruncatedPayload);
  auto trailing = bytes;
  trailing.push_back(0);
  EXPECT_EQ(code_of([&] { io::decode_tensor(trailing); }), ErrorCode::kDecodeError);
  EXPECT_EQ(code_of([&] { io::read_tensor("/nonexistent/x.jppt"); }), ErrorCode::kIo);
}

PanopticPartMap random_valid_map(std::mt19937_64& rng, const ClassTaxonomy& t, std::size_t h, std::size_t w) {
  PanopticPartMap m(h, w);
  for (std::size_t i = 0; i < m.size(); ++i) {
    switch (rng() % 4) {
      case 0: break;
      case 1: m[i] = {t.stuff()[rng() % t.num_stuff()].id, 0, 0}; break;
      case 2: m[i] = {12, static_cast<InstanceId>(1 + rng() % 65535), 0}; break;
      default: m[i] = {10, static_cast<InstanceId>(1 + rng() % 300), static_cast<PartId>(1 + rng() % 2)}; break;
    }
  }
  return m;
}

TEST(LabelPng, RandomRoundTrip) {
  ClassTaxonomy t = tiny_taxonomy();
  std::mt19937_64 rng(2);
  for (int i = 0; i < 10; ++i) {
    auto m = random_valid_map(rng, t, 1 + rng() % 40, 1 + rng() % 40);
    EXPECT_EQ(io::decode_labelmap_png(io::encode_labelmap_png(m)), m);
  }
  auto m = random_valid_map(rng, t, 9, 11);
  const auto path = scratch("m.png").string();
  io::write_labelmap_png(m, path);
  EXPECT_EQ(io::read_labelmap_png(path), m);
}

TEST(LabelPng, VoidIsBlackSixteenBit) {
  PanopticPartMap m(2, 3);
  m.at(1, 2) = {24, 300, 2};
  auto bytes = io::encode_labelmap_png(m);
  // IHDR: bit depth 16, color type 2 (RGB).
  EXPECT_EQ(bytes[24], 16);
  EXPECT_EQ(bytes[25], 2);
  auto back = io::decode_labelmap_png(bytes);
  EXPECT_TRUE(back.at(0, 0).is_void());
  EXPECT_EQ(back.at(1, 2), (PanopticPartLabel{24, 300, 2}));
}

TEST(LabelPng, Errors) {
  PanopticPartMap m(1, 1);
  m.at(0, 0) = {10, 70000, 0};
  EXPECT_EQ(code_of([&] { io::encode_labelmap_png(m); }), ErrorCode::kFieldOverflow);
  std::vector<std::uint8_t> junk{1, 2, 3, 4, 5};
  EXPECT_EQ(code_of([&] { io::decode_labelmap_png(junk); }), ErrorCode::kDecodeError);
  io::RgbImage eight{1, 1, {1, 2, 3}};
  EXPECT_EQ(code_of([&] { io::decode_labelmap_png(io::encode_rgb_png(eight)); }), ErrorCode::kDecodeError);
}

TEST(Render, VoidMapIsBlackAndOutputIsDeterministic) {
  ClassTaxonomy t = tiny_taxonomy();
  PanopticPartMap empty(4, 5);
  auto img = io::render(empty, t);
  for (auto b : img.pixels) EXPECT_EQ(b, 0);
  std::mt19937_64 rng(3);
  auto m = random_valid_map(rng, t, 16, 16);
  EXPECT_EQ(io::encode_rgb_png(io::render(m, t)), io::encode_rgb_png(io::render(m, t)));
  auto decoded = io::decode_rgb_png(io::encode_rgb_png(io::render(m, t)));
  EXPECT_EQ(decoded.pixels, io::render(m, t).pixels);
}

TEST(Render, SameClassSameHueDistinctOutlines) {
  ClassTaxonomy t = tiny_taxonomy();
  PanopticPartMap m(5, 10);
  for (std::size_t y = 0; y < 5; ++y) {
    for (std::size_t x = 0; x < 10; ++x) m.at(y, x) = {12, x < 5 ? 1u : 2u, 0};
  }
  auto img = io::render(m, t);
  auto px = [&](std::size_t y, std::size_t x) {
    const std::size_t i = (y * 10 + x) * 3;
    return std::array<std::uint8_t, 3>{img.pixels[i], img.pixels[i + 1], img.pixels[i + 2]};
  };
  EXPECT_EQ(px(2, 2), px(2, 7));  // interiors share the class color
  EXPECT_NE(px(0, 2), px(0, 7));  // outlines differ per instance
  EXPECT_NE(px(0, 2), px(2, 2));
}

TEST(SceneIo, InstancesRoundTripWithRelativeMaskRefs) {
  std::vector<InstancePrediction> preds{full_mask(10, {1, 2, 5, 6}, 0.75, 0.5f), full_mask(12, {0, 0, 3, 1}, 0.25)};
  preds[0].mask[3] = 0.125f;
  const auto dir = scratch("inst");
  fs::create_directories(dir);
  const auto path = (dir / "instances.json").string();
  io::write_instances(preds, path);
  auto back = io::read_instances(path);
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back[i].box, preds[i].box);
    EXPECT_EQ(back[i].class_id, preds[i].class_id);
    EXPECT_EQ(back[i].confidence, preds[i].confidence);
    EXPECT_EQ(back[i].mask, preds[i].mask);
  }
}

TEST(SceneIo, FractionalBoxesSnapOutward) {
  const auto dir = scratch("frac");
  fs::create_directories(dir / "masks");
  io::write_tensor(TensorF32({1, 1}, {1.0f}), (dir / "masks" / "m.jppt").string());
  io::write_text_file((dir / "i.json").string(),
                      R"([{"box": [1.5, 2.2, 3.1, 4.0], "class_id": 10, "confidence": 0.9,
                           "mask": {"h": 1, "w": 1, "tensor_ref": "masks/m.jppt"}}])");
  auto back = io::read_instances((dir / "i.json").string());
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].box, (Box{1, 2, 4, 4}));
}

TEST(SceneIo, SceneDirectoryRoundTrip) {
  ClassTaxonomy t = load_taxonomy_file(fixture("cpp_taxonomy.json"));
  auto spec = synth::random_spec(t, 5, 24, 20, 4, true);
  auto scene = synth::generate(spec, t);
  io::SceneData data{to_tensor(scene.semantic), to_tensor(scene.parts), scene.instances, scene.gt,
                     synth::spec_to_json(spec)};
  const auto dir = scratch("scene").string();
  io::write_scene(data, dir);
  auto back = io::read_scene(dir);
  EXPECT_EQ(back.semantic, data.semantic);
  EXPECT_EQ(back.parts, data.parts);
  ASSERT_EQ(back.instances.size(), data.instances.size());
  ASSERT_TRUE(back.gt.has_value());
  EXPECT_EQ(*back.gt, scene.gt);
  EXPECT_EQ(synth::spec_to_json(synth::spec_from_json(*back.spec_json)), *data.spec_json);
}

}  // namespace
}  // namespace jppf
