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

#include <random>

#include <gtest/gtest.h>

#include "core/error.hpp"
#include "core/instances.hpp"
#include "test_util.hpp"

namespace jppf {
namespace {

using testing::full_mask;
using testing::tiny_taxonomy;

std::vector<double> confidences(const std::vector<InstancePrediction>& v) {
  std::vector<double> out;
  for (const auto& p : v) out.push_back(p.confidence);
  return out;
}

TEST(FilterAndSort, ThresholdAndOrder) {
  std::vector<InstancePrediction> in{full_mask(10, {0, 0, 2, 2}, 0.9), full_mask(10, {0, 0, 2, 2}, 0.3),
                                     full_mask(10, {0, 0, 2, 2}, 0.7)};
  EXPECT_EQ(confidences(filter_and_sort(in, 0.5)), (std::vector<double>{0.9, 0.7}));
  EXPECT_TRUE(filter_and_sort({}, 0.5).empty());
  EXPECT_TRUE(filter_and_sort(in, 0.95).empty());
}

TEST(FilterAndSort, ThresholdIsInclusiveAndTiesAreStable) {
  std::vector<InstancePrediction> in{full_mask(10, {0, 0, 1, 1}, 0.5), full_mask(11, {0, 0, 1, 1}, 0.8),
                                     full_mask(12, {0, 0, 1, 1}, 0.5)};
  auto out = filter_and_sort(in, 0.5);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].class_id, 11u);
  EXPECT_EQ(out[1].class_id, 10u);
  EXPECT_EQ(out[2].class_id, 12u);
  EXPECT_THROW(filter_and_sort(in, 1.5), Error);
}

TEST(FilterAndSort, Idempotent) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<InstancePrediction> in;
  for (int i = 0; i < 50; ++i) {
    auto p = full_mask(10, {0, 0, 1, 1}, std::round(u(rng) * 10) / 10);
    p.box.x1 = 1 + i;  // tag
    in.push_back(p);
  }
  auto once = filter_and_sort(in, 0.4);
  auto twice = filter_and_sort(once, 0.4);
  ASSERT_EQ(once.size(), twice.size());
  for (std::size_t i = 0; i < once.size(); ++i) EXPECT_EQ(once[i].box, twice[i].box);
}

TEST(PasteMask, ConstantMaskFillsBox) {
  auto p = full_mask(10, {1, 1, 5, 5}, 1.0);
  p.mask_height = p.mask_width = 2;
  p.mask.assign(4, 1.0f);
  auto c = paste_mask(p, 8, 8);
  auto dense = c.full_canvas();
  std::size_t ones = 0;
  for (std::size_t y = 0; y < 8; ++y) {
    for (std::size_t x = 0; x < 8; ++x) {
      const bool inside = y >= 1 && y < 5 && x >= 1 && x < 5;
      EXPECT_EQ(dense[y * 8 + x], inside ? 1.0f : 0.0f);
      ones += inside;
    }
  }
  EXPECT_EQ(ones, 16u);
}

TEST(PasteMask, SinglePixelMask) {
  InstancePrediction p{1, 1, {0.6f}, {2, 2, 5, 5}, 10, 1.0};
  auto c = paste_mask(p, 6, 6);
  for (float v : c.box_mask) EXPECT_FLOAT_EQ(v, 0.6f);
  EXPECT_EQ(c.box_mask.size(), 9u);
}

TEST(PasteMask, BilinearHalfPixelWeights) {
  InstancePrediction p{1, 2, {1.0f, 0.0f}, {0, 0, 4, 1}, 10, 1.0};
  auto c = paste_mask(p, 1, 4);
  const std::vector<float> expected{1.0f, 0.75f, 0.25f, 0.0f};
  EXPECT_EQ(c.box_mask, expected);
}

TEST(PasteMask, RangeAndZeroOutsideOnRandomMasks) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  for (int trial = 0; trial < 100; ++trial) {
    const int x0 = static_cast<int>(rng() % 10);
    const int y0 = static_cast<int>(rng() % 10);
    Box b{x0, y0, x0 + 1 + static_cast<int>(rng() % 10), y0 + 1 + static_cast<int>(rng() % 10)};
    InstancePrediction p;
    p.mask_height = 1 + rng() % 7;
    p.mask_width = 1 + rng() % 7;
    for (std::size_t i = 0; i < p.mask_height * p.mask_width; ++i) p.mask.push_back(u(rng));
    p.box = b;
    p.class_id = 10;
    p.confidence = 1.0;
    auto c = paste_mask(p, 20, 20);
    auto dense = c.full_canvas();
    for (std::size_t y = 0; y < 20; ++y) {
      for (std::size_t x = 0; x < 20; ++x) {
        const float v = dense[y * 20 + x];
        EXPECT_GE(v, 0.0f);
        EXPECT_LE(v, 1.0f);
        if (!b.contains(y, x)) {
          EXPECT_EQ(v, 0.0f);
        }
        EXPECT_EQ(v, c.value(y, x));
      }
    }
  }
}

TEST(PasteMask, BoxOutsideCanvas) {
  try {
    paste_mask(full_mask(10, {2, 2, 9, 4}, 1.0), 8, 8);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBoxOutOfCanvas);
  }
  EXPECT_THROW(paste_mask(full_mask(10, {-1, 0, 2, 2}, 1.0), 8, 8), Error);
  EXPECT_THROW(paste_mask(full_mask(10, {3, 0, 3, 2}, 1.0), 8, 8), Error);
}

TEST(PasteMask, RejectsOutOfRangeMaskValues) {
  auto p = full_mask(10, {0, 0, 2, 2}, 1.0, 1.5f);
  EXPECT_THROW(paste_mask(p, 4, 4), Error);
}

CanvasInstance canvas(Box b, double conf, ClassId c = 10) {
  return paste_mask(full_mask(c, b, conf), 32, 32);
}

TEST(OverlapNms, IdenticalBoxesKeepFirst) {
  auto out = overlap_nms({canvas({0, 0, 4, 4}, 0.9), canvas({0, 0, 4, 4}, 0.8)}, 0.5);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_DOUBLE_EQ(out[0].confidence, 0.9);
  EXPECT_EQ(out[0].id, 1u);
}

TEST(OverlapNms, DisjointBoxesAllKeptWithIds) {
  auto out = overlap_nms({canvas({0, 0, 4, 4}, 0.9), canvas({10, 10, 14, 14}, 0.8),
                          canvas({20, 0, 24, 4}, 0.7)},
                         0.5);
  ASSERT_EQ(out.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(out[i].id, i + 1);
}

TEST(OverlapNms, IouExactlyAtThresholdKeepsBoth) {
  // [0,4)x[0,3) and [0,4)x[1,4): intersection 8, union 16.
  Box a{0, 0, 4, 3};
  Box b{0, 1, 4, 4};
  ASSERT_DOUBLE_EQ(box_iou(a, b), 0.5);
  EXPECT_EQ(overlap_nms({canvas(a, 0.9), canvas(b, 0.8)}, 0.5).size(), 2u);
}

TEST(OverlapNms, PerClassPools) {
  std::vector<CanvasInstance> in{canvas({0, 0, 4, 4}, 0.9, 10), canvas({0, 0, 4, 4}, 0.8, 11)};
  EXPECT_EQ(overlap_nms(in, 0.5, false).size(), 1u);
  EXPECT_EQ(overlap_nms(in, 0.5, true).size(), 2u);
}

TEST(OverlapNms, FixedPointAndPairwiseBound) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<CanvasInstance> in;
    const int n = static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) {
      const int x0 = static_cast<int>(rng() % 24);
      const int y0 = static_cast<int>(rng() % 24);
      in.push_back(canvas({x0, y0, x0 + 2 + static_cast<int>(rng() % 7), y0 + 2 + static_cast<int>(rng() % 7)},
                          1.0 - 0.05 * i));
    }
    auto once = overlap_nms(in, 0.5);
    for (std::size_t i = 0; i < once.size(); ++i) {
      for (std::size_t j = i + 1; j < once.size(); ++j) EXPECT_LE(box_iou(once[i].box, once[j].box), 0.5);
    }
    auto twice = overlap_nms(once, 0.5);
    ASSERT_EQ(once.size(), twice.size());
    for (std::size_t i = 0; i < once.size(); ++i) {
      EXPECT_EQ(once[i].box, twice[i].box);
      EXPECT_EQ(once[i].id, twice[i].id);
    }
  }
}

TEST(Preprocess, RejectsNonThingClass) {
  try {
    preprocess_instances(tiny_taxonomy(), {full_mask(1, {0, 0, 2, 2}, 0.9)}, 8, 8, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotAThingClass);
  }
}

TEST(Preprocess, FullChain) {
  auto out = preprocess_instances(tiny_taxonomy(),
                                  {full_mask(10, {0, 0, 4, 4}, 0.6), full_mask(11, {0, 0, 4, 4}, 0.9),
                                   full_mask(12, {6, 6, 8, 8}, 0.2), full_mask(12, {5, 5, 8, 8}, 0.7)},
                                  8, 8, {});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].class_id, 11u);
  EXPECT_EQ(out[1].class_id, 12u);
  EXPECT_EQ(out[1].id, 2u);
}

}  // namespace
}  // namespace jppf
