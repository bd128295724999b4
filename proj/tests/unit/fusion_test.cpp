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

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "core/error.hpp"
#include "core/fusion.hpp"
#include "synth/scene.hpp"
#include "test_util.hpp"

namespace jppf {
namespace {

using testing::fixture;
using testing::full_mask;
using testing::parts_for;
using testing::semantic_for;
using testing::set_plane;
using testing::tiny_taxonomy;

// Stack of k single-pixel layers holding `values`.
struct PixelStack {
  std::vector<std::vector<float>> storage;
  MaskedLogitStack stack;

  explicit PixelStack(const std::vector<float>& values) {
    stack.height = 1;
    stack.width = 1;
    stack.region = {0, 0, 1, 1};
    storage.reserve(values.size());
    for (float v : values) {
      storage.push_back({v});
      stack.layers.push_back({LayerSource::kSemantic, storage.back().data(), 1, {0, 0, 1, 1}});
    }
  }
  float fused() const { return fuse_logits(stack).value(0, 0); }
};

float fl(std::vector<float> v) { return PixelStack(v).fused(); }

TEST(FuseLogits, GoldenValues) {
  EXPECT_EQ(fl({0, 0, 0}), 0.0f);
  EXPECT_NEAR(fl({1, 1, 1}), 6.5795271, 1e-6);
  // 2 * sigmoid(0.8) * 1.6, evaluated directly.
  EXPECT_NEAR(fl({0.8f, 0.8f}), 2.2079184, 1e-6);
}

TEST(FuseLogits, ConsistencyReward) {
  EXPECT_NEAR(fl({2, 2, 2}), 15.854, 1e-3);
  EXPECT_NEAR(fl({2, 2, 0}), 9.0464, 1e-3);
  EXPECT_NEAR(fl({2, 0, 0}), 3.762, 1e-3);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  for (int i = 0; i < 1000; ++i) {
    float x = u(rng);
    if (x == 0.0f) x = 1.0f;
    EXPECT_GT(fl({x, x, x}), fl({x, x, 0}));
    EXPECT_GT(fl({x, x, 0}), fl({x, 0, 0}));
  }
}

TEST(FuseLogits, PermutationInvariance) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<float> v(1 + rng() % 6);
    for (auto& x : v) x = u(rng);
    const float base = fl(v);
    std::shuffle(v.begin(), v.end(), rng);
    EXPECT_FLOAT_EQ(fl(v), base);
  }
}

TEST(FuseLogits, IdenticalLayersMonotoneInValueAndDepth) {
  for (std::size_t k = 1; k <= 4; ++k) {
    float previous = -1.0f;
    for (int i = 0; i <= 100; ++i) {
      const float x = static_cast<float>(i) / 100.0f;
      const float v = fl(std::vector<float>(k, x));
      EXPECT_GE(v, previous);
      EXPECT_NEAR(v, k * k * x * sigmoid(x), 1e-5);
      EXPECT_GE(fl(std::vector<float>(k + 1, x)), v);
      previous = v;
    }
  }
}

TEST(FuseLogits, MasksOutsideRegionAndRejectsBadStacks) {
  std::vector<float> plane(16, 1.0f);
  MaskedLogitStack s{4, 4, {1, 1, 3, 3}, {{LayerSource::kSemantic, plane.data(), 4, {0, 0, 4, 4}}}};
  FusedMap m = fuse_logits(s);
  EXPECT_EQ(m.value(0, 0), 0.0f);
  EXPECT_GT(m.value(1, 1), 0.0f);
  auto dense = m.dense();
  EXPECT_EQ(std::count_if(dense.begin(), dense.end(), [](float v) { return v > 0.0f; }), 4);

  MaskedLogitStack empty{4, 4, {0, 0, 4, 4}, {}};
  try {
    fuse_logits(empty);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
  MaskedLogitStack uncovered{4, 4, {0, 0, 4, 4}, {{LayerSource::kInstance, plane.data(), 2, {0, 0, 2, 2}}}};
  EXPECT_THROW(fuse_logits(uncovered), Error);
}

CanvasInstance instance(ClassId c, Box b, InstanceId id, std::size_t h, std::size_t w) {
  CanvasInstance inst = paste_mask(full_mask(c, b, 1.0), h, w);
  inst.id = id;
  return inst;
}

TEST(ThingCandidates, PersonGetsOneStackPerPart) {
  ClassTaxonomy t = load_taxonomy_file(fixture("cpp_taxonomy.json"));
  auto s = semantic_for(t, 8, 8);
  auto p = parts_for(t, 8, 8);
  auto c = build_thing_candidates(instance(24, {1, 1, 5, 5}, 3, 8, 8), s, p, t);
  ASSERT_EQ(c.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(c[i].identity, (PanopticPartLabel{24, 3, static_cast<PartId>(i + 1)}));
    ASSERT_EQ(c[i].stack.layers.size(), 3u);
    EXPECT_EQ(c[i].stack.layers[0].source, LayerSource::kSemantic);
    EXPECT_EQ(c[i].stack.layers[1].source, LayerSource::kInstance);
    EXPECT_EQ(c[i].stack.layers[2].source, LayerSource::kPart);
    EXPECT_EQ(c[i].stack.region, (Box{1, 1, 5, 5}));
    // Replicated semantic and instance layers are shared views.
    EXPECT_EQ(c[i].stack.layers[0].values, c[0].stack.layers[0].values);
    EXPECT_EQ(c[i].stack.layers[1].values, c[0].stack.layers[1].values);
  }
}

TEST(ThingCandidates, NonPartitionableUsesBackgroundChannel) {
  ClassTaxonomy t = load_taxonomy_file(fixture("cpp_taxonomy.json"));
  auto s = semantic_for(t, 8, 8);
  auto p = parts_for(t, 8, 8);
  auto c = build_thing_candidates(instance(31, {0, 0, 3, 3}, 1, 8, 8), s, p, t);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].identity, (PanopticPartLabel{31, 1, 0}));
  ASSERT_EQ(c[0].stack.layers.size(), 3u);
  EXPECT_EQ(c[0].stack.layers[2].values, p.plane(0).data());
}

TEST(ThingCandidates, StuffClassIsRejected) {
  ClassTaxonomy t = load_taxonomy_file(fixture("cpp_taxonomy.json"));
  auto s = semantic_for(t, 8, 8);
  auto p = parts_for(t, 8, 8);
  CanvasInstance inst = instance(24, {0, 0, 3, 3}, 1, 8, 8);
  inst.class_id = 7;
  try {
    build_thing_candidates(inst, s, p, t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotAThingClass);
  }
}

TEST(StuffCandidates, OneTwoLayerStackPerStuffClass) {
  ClassTaxonomy t = load_taxonomy_file(fixture("cpp_taxonomy.json"));
  auto c = build_stuff_candidates(semantic_for(t, 4, 4), parts_for(t, 4, 4), t);
  ASSERT_EQ(c.size(), 11u);
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_EQ(c[i].identity, (PanopticPartLabel{t.stuff()[i].id, 0, 0}));
    EXPECT_EQ(c[i].stack.layers.size(), 2u);
    EXPECT_EQ(c[i].stack.region, (Box{0, 0, 4, 4}));
  }
}

TEST(StuffCandidates, PartitionableStuffHook) {
  ClassTaxonomy t({{1, "ground", {}}, {2, "facade", {1, 2, 3}}}, {{10, "thing", {}}},
                  {{0, "background"}, {1, "door"}, {2, "window"}, {3, "roof"}});
  auto s = semantic_for(t, 4, 4);
  auto p = parts_for(t, 4, 4);
  auto c = build_stuff_candidates(s, p, t);
  ASSERT_EQ(c.size(), 4u);
  for (std::size_t k = 1; k < 4; ++k) {
    EXPECT_EQ(c[k].identity, (PanopticPartLabel{2, 0, static_cast<PartId>(k)}));
    EXPECT_EQ(c[k].stack.layers.size(), 2u);
    EXPECT_EQ(c[k].stack.layers[1].values, p.plane(k).data());
  }
}

TEST(StuffCandidates, NoStuffClassesGiveNoStacks) {
  ClassTaxonomy t({}, {{10, "thing", {}}}, {{0, "background"}});
  EXPECT_TRUE(build_stuff_candidates(semantic_for(t, 2, 2), parts_for(t, 2, 2), t).empty());
}

TEST(StuffCandidates, MissingBackgroundChannel) {
  ClassTaxonomy t({{1, "a", {}}}, {}, {});
  try {
    make_part_logits(t, TensorF32({0, 2, 2}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingBackgroundChannel);
  }
  DenseLogits none = testing::filled(0, 2, 2, 0.0f);
  try {
    build_stuff_candidates(semantic_for(t, 2, 2), none, t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingBackgroundChannel);
  }
}

TEST(Assemble, ClosedFormCounts) {
  ClassTaxonomy t = load_taxonomy_file(fixture("cpp_taxonomy.json"));
  auto s = semantic_for(t, 16, 16);
  auto p = parts_for(t, 16, 16);
  FusionConfig cfg;
  cfg.min_stuff_area = 0;

  auto r = fuse_canvas_instances(s, p, {instance(31, {0, 0, 4, 4}, 1, 16, 16), instance(24, {8, 8, 12, 12}, 2, 16, 16)},
                                 cfg, t);
  EXPECT_EQ(r.candidates.size(), 16u);
  EXPECT_EQ(r.candidates.num_things, 2u);
  EXPECT_EQ(r.candidates.num_things_np, 1u);
  EXPECT_EQ(r.candidates.num_things_p, 1u);

  EXPECT_EQ(fuse_canvas_instances(s, p, {}, cfg, t).candidates.size(), 11u);
  auto two = fuse_canvas_instances(
      s, p, {instance(24, {0, 0, 4, 4}, 1, 16, 16), instance(24, {8, 8, 12, 12}, 2, 16, 16)}, cfg, t);
  EXPECT_EQ(two.candidates.size(), 11u + 8u);
}

TEST(Assemble, ChannelOrderStuffThenInstanceId) {
  ClassTaxonomy t = tiny_taxonomy();
  auto s = semantic_for(t, 8, 8);
  auto p = parts_for(t, 8, 8);
  FusionConfig cfg;
  cfg.min_stuff_area = 0;
  auto r = fuse_canvas_instances(s, p, {instance(12, {0, 0, 2, 2}, 2, 8, 8), instance(10, {4, 4, 8, 8}, 1, 8, 8)},
                                 cfg, t);
  const std::vector<PanopticPartLabel> expected{{1, 0, 0}, {2, 0, 0}, {10, 1, 1}, {10, 1, 2}, {12, 2, 0}};
  EXPECT_EQ(r.candidates.identities, expected);
}

TEST(Assemble, ShapeMismatch) {
  FusedMap a{2, 2, {0, 0, 2, 2}, std::vector<float>(4, 0.0f)};
  FusedMap b{3, 3, {0, 0, 3, 3}, std::vector<float>(9, 0.0f)};
  try {
    assemble({}, {{{1, 0, 0}, a}, {{2, 0, 0}, b}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
}

TEST(Resolve, PartCandidateWinsInsideInstance) {
  ClassTaxonomy t = tiny_taxonomy();
  auto s = semantic_for(t, 4, 4);
  auto p = parts_for(t, 4, 4);
  set_plane(s, 0, 1.0f);                        // road everywhere
  set_plane(s, 2, 1.0f);                        // person everywhere
  set_plane(p, 1, 1.0f);                        // head everywhere
  FusionConfig cfg;
  cfg.min_stuff_area = 0;
  auto r = fuse_canvas_instances(s, p, {instance(10, {0, 0, 2, 2}, 1, 4, 4)}, cfg, t);
  EXPECT_EQ(r.map.at(0, 0), (PanopticPartLabel{10, 1, 1}));
  EXPECT_EQ(r.map.at(1, 1), (PanopticPartLabel{10, 1, 1}));
  EXPECT_EQ(r.map.at(3, 3), (PanopticPartLabel{1, 0, 0}));
}

TEST(Resolve, StuffFallbackReadsSemanticArgmax) {
  ClassTaxonomy t = tiny_taxonomy();
  auto s = semantic_for(t, 2, 2);
  auto p = parts_for(t, 2, 2);
  set_plane(s, 1, 0.9f);  // sky
  set_plane(s, 0, 0.4f);  // road
  set_plane(p, 0, 1.0f);
  FusionConfig cfg;
  cfg.min_stuff_area = 0;
  auto m = fuse_canvas_instances(s, p, {}, cfg, t).map;
  for (const auto& l : m.labels()) EXPECT_EQ(l, (PanopticPartLabel{2, 0, 0}));
}

TEST(Resolve, TiesBreakTowardLowerChannel) {
  ClassTaxonomy t = tiny_taxonomy();
  auto s = semantic_for(t, 4, 4);
  auto p = parts_for(t, 4, 4);
  set_plane(s, 4, 1.0f);  // pole
  FusionConfig cfg;
  cfg.min_stuff_area = 0;
  auto r = fuse_canvas_instances(s, p, {instance(12, {0, 0, 4, 4}, 1, 4, 4), instance(12, {0, 0, 4, 4}, 2, 4, 4)},
                                 cfg, t);
  for (const auto& l : r.map.labels()) EXPECT_EQ(l, (PanopticPartLabel{12, 1, 0}));
}

TEST(Resolve, NoCandidatesMeansVoid) {
  ClassTaxonomy t({}, {{10, "thing", {}}}, {{0, "background"}});
  auto s = semantic_for(t, 4, 4, 0.5f);
  auto p = parts_for(t, 4, 4, 0.5f);
  FusionConfig cfg;
  cfg.min_stuff_area = 0;
  auto r = fuse_canvas_instances(s, p, {instance(10, {0, 0, 2, 2}, 1, 4, 4)}, cfg, t);
  EXPECT_EQ(r.map.at(0, 0), (PanopticPartLabel{10, 1, 0}));
  EXPECT_TRUE(r.map.at(3, 3).is_void());
  EXPECT_TRUE(fuse_canvas_instances(s, p, {}, cfg, t).map.at(0, 0).is_void());
}

TEST(Resolve, PartitionableStuffGetsBestPart) {
  ClassTaxonomy t({{1, "ground", {}}, {2, "facade", {1, 2}}}, {}, {{0, "background"}, {1, "door"}, {2, "window"}});
  auto s = semantic_for(t, 2, 2);
  auto p = parts_for(t, 2, 2);
  set_plane(s, 1, 1.0f);
  set_plane(p, 2, 1.0f);
  FusionConfig cfg;
  cfg.min_stuff_area = 0;
  auto m = fuse_canvas_instances(s, p, {}, cfg, t).map;
  for (const auto& l : m.labels()) EXPECT_EQ(l, (PanopticPartLabel{2, 0, 2}));
}

PanopticPartMap two_region_map(std::size_t road_pixels) {
  PanopticPartMap m(33, 64);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = i < road_pixels ? PanopticPartLabel{1, 0, 0} : PanopticPartLabel{2, 0, 0};
  return m;
}

TEST(MinArea, StrictBoundaryAt2048) {
  ClassTaxonomy t = tiny_taxonomy();
  PanopticPartMap keep = two_region_map(2048);
  filter_small_stuff(keep, t, 2048);
  EXPECT_EQ(keep.at(0, 0), (PanopticPartLabel{1, 0, 0}));
  EXPECT_TRUE(keep.at(32, 63).is_void());  // 64-pixel sky strip

  PanopticPartMap drop = two_region_map(2047);
  filter_small_stuff(drop, t, 2048);
  EXPECT_TRUE(drop.at(0, 0).is_void());
}

TEST(MinArea, ConnectivityIsFourWayAndThingsUntouched) {
  ClassTaxonomy t = tiny_taxonomy();
  PanopticPartMap m(2, 2);
  m.at(0, 0) = {1, 0, 0};
  m.at(1, 1) = {1, 0, 0};
  m.at(0, 1) = {10, 1, 1};
  m.at(1, 0) = {10, 1, 2};
  filter_small_stuff(m, t, 2);
  EXPECT_TRUE(m.at(0, 0).is_void());
  EXPECT_TRUE(m.at(1, 1).is_void());
  EXPECT_EQ(m.at(0, 1), (PanopticPartLabel{10, 1, 1}));
}

TEST(MinArea, AppliedByResolve) {
  ClassTaxonomy t = tiny_taxonomy();
  auto s = semantic_for(t, 33, 64);
  auto p = parts_for(t, 33, 64);
  for (std::size_t i = 0; i < 33 * 64; ++i) {
    s.values[i < 2048 ? i : 33 * 64 + i] = 1.0f;  // road on the first 2048 pixels, sky after
  }
  FusionConfig cfg;
  auto m = fuse_canvas_instances(s, p, {}, cfg, t).map;
  EXPECT_EQ(m.at(0, 0), (PanopticPartLabel{1, 0, 0}));
  EXPECT_TRUE(m.at(32, 0).is_void());
}

TEST(Pipeline, ThreadCountDoesNotChangeOutput) {
  ClassTaxonomy t = load_taxonomy_file(fixture("cpp_taxonomy.json"));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto spec = synth::random_spec(t, seed, 48, 40, 6, true);
    auto scene = synth::generate(spec, t);
    FusionConfig one;
    one.min_stuff_area = 64;
    FusionConfig many = one;
    many.threads = 5;
    auto a = run_jppf(scene.semantic, scene.parts, scene.instances, one, t);
    auto b = run_jppf(scene.semantic, scene.parts, scene.instances, many, t);
    EXPECT_EQ(a.map, b.map);
    ASSERT_EQ(a.candidates.size(), b.candidates.size());
    for (std::size_t c = 0; c < a.candidates.size(); ++c) {
      EXPECT_EQ(a.candidates.channels[c].scores, b.candidates.channels[c].scores);
    }
  }
}

TEST(Pipeline, RejectsInconsistentShapes) {
  ClassTaxonomy t = tiny_taxonomy();
  auto s = semantic_for(t, 4, 4);
  auto p = parts_for(t, 5, 4);
  try {
    jppf_pipeline(s, p, {}, {}, t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
  EXPECT_THROW(make_semantic_logits(t, TensorF32({4, 2, 2})), Error);
  try {
    make_semantic_logits(t, TensorF32({5, 1, 1}, {0, 0, 1.5f, 0, 0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kValueOutOfRange);
  }
}

TEST(PanopticFuse, CleanSceneGivesProjectedGroundTruth) {
  ClassTaxonomy t = load_taxonomy_file(fixture("cpp_taxonomy.json"));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto scene = synth::generate(synth::random_spec(t, seed, 32, 32, 4, false), t);
    FusionConfig cfg;
    cfg.min_stuff_area = 0;
    auto pan = panoptic_fuse(scene.semantic, scene.instances, cfg, t);
    for (std::size_t i = 0; i < pan.size(); ++i) {
      PanopticPartLabel g = scene.gt[i];
      g.part = 0;
      ASSERT_EQ(pan[i], g) << "seed " << seed << " pixel " << i;
    }
  }
}

TEST(PanopticFuse, NoInstancesFallsBackToStuffArgmax) {
  ClassTaxonomy t = tiny_taxonomy();
  auto s = semantic_for(t, 2, 2);
  set_plane(s, 1, 0.7f);
  set_plane(s, 0, 0.2f);
  FusionConfig cfg;
  cfg.min_stuff_area = 0;
  auto pan = panoptic_fuse(s, {}, cfg, t);
  for (const auto& l : pan.labels()) EXPECT_EQ(l, (PanopticPartLabel{2, 0, 0}));
}

TEST(PanopticFuse, MatchesJointFusionUnderUniformParts) {
  ClassTaxonomy t = load_taxonomy_file(fixture("cpp_taxonomy.json"));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto scene = synth::generate(synth::random_spec(t, seed, 32, 32, 4, false), t);
    DenseLogits uniform = scene.parts;
    std::fill(uniform.values.begin(), uniform.values.end(), 0.0f);
    FusionConfig cfg;
    cfg.min_stuff_area = 0;
    auto joint = jppf_pipeline(scene.semantic, uniform, scene.instances, cfg, t);
    auto pan = panoptic_fuse(scene.semantic, scene.instances, cfg, t);
    for (std::size_t i = 0; i < pan.size(); ++i) {
      ASSERT_EQ(pan[i].semantic, joint[i].semantic);
      ASSERT_EQ(pan[i].instance, joint[i].instance);
    }
  }
}

}  // namespace
}  // namespace jppf
