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

#include "synth/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <json.hpp>

#include "core/error.hpp"

namespace jppf::synth {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

std::size_t below(Rng& rng, std::size_t n) {
  return n == 0 ? 0 : std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// Softmax over one-hot(target) logits with optional Gaussian noise, written
// into `out` with a stride of `plane` between channels.
void soft_one_hot(Rng& rng, std::size_t channels, std::size_t target, const NoiseModel& noise,
                  float* out, std::size_t plane, std::vector<double>& scratch) {
  scratch.resize(channels);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double peak = -1e300;
  for (std::size_t c = 0; c < channels; ++c) {
    double z = (c == target ? 1.0 : 0.0);
    if (noise.logit_noise > 0.0) z += noise.logit_noise * gauss(rng);
    scratch[c] = z / noise.temperature;
    peak = std::max(peak, scratch[c]);
  }
  double total = 0.0;
  for (auto& z : scratch) {
    z = std::exp(z - peak);
    total += z;
  }
  for (std::size_t c = 0; c < channels; ++c) {
    out[c * plane] = static_cast<float>(std::clamp(scratch[c] / total, 0.0, 1.0));
  }
}

bool in_ellipse(const Box& b, std::size_t y, std::size_t x) {
  const double cx = 0.5 * (b.x0 + b.x1);
  const double cy = 0.5 * (b.y0 + b.y1);
  const double rx = 0.5 * b.width();
  const double ry = 0.5 * b.height();
  const double dx = (static_cast<double>(x) + 0.5 - cx) / rx;
  const double dy = (static_cast<double>(y) + 0.5 - cy) / ry;
  return dx * dx + dy * dy <= 1.0;
}

}  // namespace

void check_spec(const SceneSpec& spec, const ClassTaxonomy& t) {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::kInvalidSpec, why); };
  if (spec.height == 0 || spec.width == 0) fail("canvas must be non-empty");
  if (t.num_stuff() == 0) fail("taxonomy has no stuff classes");
  if (spec.num_stuff_regions == 0 || spec.num_stuff_regions > spec.width) {
    fail("num_stuff_regions must be in 1..width");
  }
  if (!(spec.noise.temperature > 0.0)) fail("temperature must be > 0");
  if (!(spec.noise.flip_prob >= 0.0 && spec.noise.flip_prob < 1.0)) fail("flip_prob must be in [0,1)");
  if (!(spec.noise.logit_noise >= 0.0)) fail("logit_noise must be >= 0");
  if (!(spec.noise.confidence_jitter >= 0.0 && spec.noise.confidence_jitter <= 1.0)) {
    fail("confidence_jitter must be in [0,1]");
  }
  if (spec.things.size() > kMaxInstance) fail("too many things");
  for (const auto& th : spec.things) {
    const Box& b = th.box;
    if (b.x0 < 0 || b.y0 < 0 || b.x0 >= b.x1 || b.y0 >= b.y1 ||
        static_cast<std::size_t>(b.x1) > spec.width || static_cast<std::size_t>(b.y1) > spec.height) {
      fail("thing box outside canvas");
    }
    if (!t.is_thing(th.class_id)) fail("thing spec uses non-thing class " + std::to_string(th.class_id));
  }
}

Scene generate(const SceneSpec& spec, const ClassTaxonomy& t) {
  check_spec(spec, t);
  Rng rng(spec.seed);
  const std::size_t h = spec.height;
  const std::size_t w = spec.width;
  const std::size_t n = h * w;

  std::vector<std::size_t> stripe_class(spec.num_stuff_regions);
  for (std::size_t r = 0; r < stripe_class.size(); ++r) {
    std::size_t s = below(rng, t.num_stuff());
    if (r > 0 && t.num_stuff() > 1 && s == stripe_class[r - 1]) s = (s + 1) % t.num_stuff();
    stripe_class[r] = s;
  }

  Scene scene;
  scene.gt = PanopticPartMap(h, w);
  std::vector<int> owner(n, -1);
  std::vector<std::uint32_t> part_target(n, 0);  // part channel of the clean layout
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      scene.gt.at(y, x) = {t.stuff()[stripe_class[x * spec.num_stuff_regions / w]].id, 0, 0};
    }
  }
  for (std::size_t k = 0; k < spec.things.size(); ++k) {
    const ThingSpec& th = spec.things[k];
    auto groups = t.class_parts(th.class_id);
    for (int y = th.box.y0; y < th.box.y1; ++y) {
      for (int x = th.box.x0; x < th.box.x1; ++x) {
        const auto uy = static_cast<std::size_t>(y);
        const auto ux = static_cast<std::size_t>(x);
        if (!in_ellipse(th.box, uy, ux)) continue;
        PartId part = 0;
        std::uint32_t channel = 0;
        if (!groups.empty()) {
          const std::size_t band = std::min(
              groups.size() - 1, static_cast<std::size_t>(y - th.box.y0) * groups.size() /
                                     static_cast<std::size_t>(th.box.height()));
          part = static_cast<PartId>(band + 1);
          channel = static_cast<std::uint32_t>(*t.group_channel(groups[band]));
        }
        scene.gt.at(uy, ux) = {th.class_id, static_cast<InstanceId>(k + 1), part};
        owner[uy * w + ux] = static_cast<int>(k);
        part_target[uy * w + ux] = channel;
      }
    }
  }

  std::vector<std::uint32_t> shifted = part_target;
  if (spec.part_boundary_shift != 0) {
    const int r = std::abs(spec.part_boundary_shift);
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        const std::size_t i = y * w + x;
        for (int dy = -r; dy <= r; ++dy) {
          bool done = false;
          for (int dx = -r; dx <= r; ++dx) {
            const long long yy = static_cast<long long>(y) + dy;
            const long long xx = static_cast<long long>(x) + dx;
            if (yy < 0 || xx < 0 || yy >= static_cast<long long>(h) || xx >= static_cast<long long>(w)) {
              continue;
            }
            const std::size_t j = static_cast<std::size_t>(yy) * w + static_cast<std::size_t>(xx);
            if (spec.part_boundary_shift < 0 && owner[i] >= 0 && owner[j] != owner[i]) {
              shifted[i] = 0;
              done = true;
            } else if (spec.part_boundary_shift > 0 && owner[i] < 0 && part_target[j] != 0) {
              shifted[i] = part_target[j];
              done = true;
            }
            if (done) break;
          }
          if (done) break;
        }
      }
    }
  }

  const NoiseModel& noise = spec.noise;
  std::vector<double> scratch;

  scene.semantic.channels = t.num_semantic_channels();
  scene.semantic.height = h;
  scene.semantic.width = w;
  scene.semantic.values.assign(scene.semantic.channels * n, 0.0f);
  for (std::size_t c = 0; c < scene.semantic.channels; ++c) {
    scene.semantic.channel_meta.push_back(t.semantic_class_at(c));
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t target = *t.semantic_channel(scene.gt[i].semantic);
    if (noise.flip_prob > 0.0 && uniform(rng) < noise.flip_prob) {
      target = below(rng, scene.semantic.channels);
    }
    soft_one_hot(rng, scene.semantic.channels, target, noise, scene.semantic.values.data() + i, n,
                 scratch);
  }

  scene.parts.channels = t.num_part_channels();
  scene.parts.height = h;
  scene.parts.width = w;
  scene.parts.values.assign(scene.parts.channels * n, 0.0f);
  for (const auto& g : t.part_groups()) scene.parts.channel_meta.push_back(g.id);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t target = shifted[i];
    if (noise.flip_prob > 0.0 && uniform(rng) < noise.flip_prob) {
      target = below(rng, scene.parts.channels);
    }
    soft_one_hot(rng, scene.parts.channels, target, noise, scene.parts.values.data() + i, n, scratch);
  }

  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t k = 0; k < spec.things.size(); ++k) {
    const ThingSpec& th = spec.things[k];
    InstancePrediction p;
    p.box = th.box;
    p.class_id = th.class_id;
    p.mask_height = static_cast<std::size_t>(th.box.height());
    p.mask_width = static_cast<std::size_t>(th.box.width());
    p.mask.resize(p.mask_height * p.mask_width);
    for (std::size_t my = 0; my < p.mask_height; ++my) {
      for (std::size_t mx = 0; mx < p.mask_width; ++mx) {
        const std::size_t i = (my + static_cast<std::size_t>(th.box.y0)) * w + mx +
                              static_cast<std::size_t>(th.box.x0);
        bool visible = owner[i] == static_cast<int>(k);
        if (noise.flip_prob > 0.0 && uniform(rng) < noise.flip_prob) visible = !visible;
        double z = visible ? 1.0 : -1.0;
        if (noise.logit_noise > 0.0) z += noise.logit_noise * gauss(rng);
        p.mask[my * p.mask_width + mx] = static_cast<float>(1.0 / (1.0 + std::exp(-z / noise.temperature)));
      }
    }
    p.confidence = 1.0 - noise.confidence_jitter * uniform(rng);
    scene.instances.push_back(std::move(p));
  }
  return scene;
}

SceneSpec random_spec(const ClassTaxonomy& t, std::uint64_t seed, std::size_t height,
                      std::size_t width, std::size_t max_things, bool noisy) {
  Rng rng(seed ^ 0x9E3779B97F4A7C15ull);
  SceneSpec spec;
  spec.height = height;
  spec.width = width;
  spec.seed = seed;
  spec.num_stuff_regions = 1 + below(rng, std::min<std::size_t>(3, width));
  if (noisy) {
    spec.noise.temperature = 0.25 + uniform(rng);
    spec.noise.flip_prob = 0.1 * uniform(rng);
    spec.noise.logit_noise = 0.5 * uniform(rng);
    spec.noise.confidence_jitter = 0.6;
  }
  if (t.num_things() == 0 || max_things == 0) return spec;
  const std::size_t count = below(rng, max_things + 1);
  const int max_side = std::max<int>(4, static_cast<int>(std::min(height, width) / 2));
  for (std::size_t k = 0; k < count; ++k) {
    for (int attempt = 0; attempt < 50; ++attempt) {
      const int bw = std::min<int>(static_cast<int>(width), 4 + static_cast<int>(below(rng, static_cast<std::size_t>(max_side - 3))));
      const int bh = std::min<int>(static_cast<int>(height), 4 + static_cast<int>(below(rng, static_cast<std::size_t>(max_side - 3))));
      const int x0 = static_cast<int>(below(rng, width - static_cast<std::size_t>(bw) + 1));
      const int y0 = static_cast<int>(below(rng, height - static_cast<std::size_t>(bh) + 1));
      Box b{x0, y0, x0 + bw, y0 + bh};
      bool ok = std::all_of(spec.things.begin(), spec.things.end(),
                            [&](const ThingSpec& o) { return box_iou(o.box, b) <= 0.3; });
      if (!ok) continue;
      spec.things.push_back({t.things()[below(rng, t.num_things())].id, b});
      break;
    }
  }
  return spec;
}

std::vector<SceneSpec> conflict_suite(std::size_t n, std::uint64_t seed, const ClassTaxonomy& t,
                                      std::size_t height, std::size_t width) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "conflict suite needs n >= 1");
  std::vector<ClassId> partitionable;
  for (const auto& c : t.things()) {
    if (!c.parts.empty()) partitionable.push_back(c.id);
  }
  if (partitionable.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "conflict suite needs a partitionable thing class");
  }
  if (height < 16 || width < 16) throw Error(ErrorCode::kInvalidArgument, "canvas too small");
  std::vector<SceneSpec> out;
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    SceneSpec spec = random_spec(t, seed + 1000003ull * (i + 1), height, width, 3, false);
    // A large partitionable anchor object, drawn first so others may occlude it.
    const int bw = static_cast<int>(width / 4 + below(rng, width / 4));
    const int bh = static_cast<int>(height / 4 + below(rng, height / 4));
    const int x0 = static_cast<int>(below(rng, width - static_cast<std::size_t>(bw)));
    const int y0 = static_cast<int>(below(rng, height - static_cast<std::size_t>(bh)));
    Box anchor{x0, y0, x0 + bw, y0 + bh};
    std::erase_if(spec.things, [&](const ThingSpec& o) { return box_iou(o.box, anchor) > 0.3; });
    spec.things.insert(spec.things.begin(), {partitionable[below(rng, partitionable.size())], anchor});
    spec.part_boundary_shift = (i % 10 == 9) ? 0 : -1 - static_cast<int>(below(rng, 2));
    out.push_back(std::move(spec));
  }
  return out;
}

ClassTaxonomy random_taxonomy(std::uint64_t seed, bool allow_partitionable_stuff) {
  Rng rng(seed);
  const std::size_t num_stuff = 1 + below(rng, 4);
  const std::size_t num_things = below(rng, 5);
  const std::size_t num_groups = 1 + below(rng, 5);
  std::vector<PartGroup> groups{{0, "background"}};
  for (std::size_t g = 1; g <= num_groups; ++g) {
    groups.push_back({static_cast<PartGroupId>(g), "group" + std::to_string(g)});
  }
  auto random_parts = [&] {
    std::vector<PartGroupId> ids(num_groups);
    std::iota(ids.begin(), ids.end(), 1u);
    std::shuffle(ids.begin(), ids.end(), rng);
    ids.resize(1 + below(rng, std::min<std::size_t>(num_groups, 4)));
    return ids;
  };
  ClassId next = 1;
  std::vector<ClassEntry> stuff;
  for (std::size_t s = 0; s < num_stuff; ++s) {
    ClassEntry c{next++, "stuff" + std::to_string(s), {}};
    if (allow_partitionable_stuff && below(rng, 3) == 0) c.parts = random_parts();
    stuff.push_back(std::move(c));
  }
  std::vector<ClassEntry> things;
  for (std::size_t k = 0; k < num_things; ++k) {
    ClassEntry c{next++, "thing" + std::to_string(k), {}};
    if (below(rng, 2) == 0) c.parts = random_parts();
    things.push_back(std::move(c));
  }
  return ClassTaxonomy(std::move(stuff), std::move(things), std::move(groups));
}

std::string spec_to_json(const SceneSpec& spec) {
  nlohmann::ordered_json doc;
  doc["height"] = spec.height;
  doc["width"] = spec.width;
  doc["seed"] = spec.seed;
  doc["num_stuff_regions"] = spec.num_stuff_regions;
  doc["things"] = nlohmann::ordered_json::array();
  for (const auto& th : spec.things) {
    doc["things"].push_back(
        {{"class_id", th.class_id}, {"box", {th.box.x0, th.box.y0, th.box.x1, th.box.y1}}});
  }
  doc["noise"] = {{"temperature", spec.noise.temperature},
                  {"flip_prob", spec.noise.flip_prob},
                  {"logit_noise", spec.noise.logit_noise},
                  {"confidence_jitter", spec.noise.confidence_jitter}};
  doc["part_boundary_shift"] = spec.part_boundary_shift;
  return doc.dump(2);
}

SceneSpec spec_from_json(const std::string& text) {
  SceneSpec spec;
  try {
    auto doc = nlohmann::json::parse(text);
    spec.height = doc.value("height", spec.height);
    spec.width = doc.value("width", spec.width);
    spec.seed = doc.value("seed", spec.seed);
    spec.num_stuff_regions = doc.value("num_stuff_regions", spec.num_stuff_regions);
    if (doc.contains("things")) {
      for (const auto& e : doc["things"]) {
        const auto& b = e.at("box");
        spec.things.push_back({e.at("class_id").get<ClassId>(),
                               {b.at(0).get<int>(), b.at(1).get<int>(), b.at(2).get<int>(),
                                b.at(3).get<int>()}});
      }
    }
    if (doc.contains("noise")) {
      const auto& nz = doc["noise"];
      spec.noise.temperature = nz.value("temperature", spec.noise.temperature);
      spec.noise.flip_prob = nz.value("flip_prob", spec.noise.flip_prob);
      spec.noise.logit_noise = nz.value("logit_noise", spec.noise.logit_noise);
      spec.noise.confidence_jitter = nz.value("confidence_jitter", spec.noise.confidence_jitter);
    }
    spec.part_boundary_shift = doc.value("part_boundary_shift", 0);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidSpec, e.what());
  }
  return spec;
}

}  // namespace jppf::synth
