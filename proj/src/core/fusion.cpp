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

#include "core/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "core/error.hpp"
#include "core/parallel.hpp"

namespace jppf {

namespace {

Box full_canvas(std::size_t height, std::size_t width) {
  return {0, 0, static_cast<int>(width), static_cast<int>(height)};
}

bool box_inside(const Box& inner, const Box& outer) {
  return inner.x0 >= outer.x0 && inner.y0 >= outer.y0 && inner.x1 <= outer.x1 &&
         inner.y1 <= outer.y1;
}

LayerView plane_view(const DenseLogits& logits, std::size_t channel, LayerSource source) {
  return {source, logits.plane(channel).data(), logits.width,
          full_canvas(logits.height, logits.width)};
}

}  // namespace

std::vector<float> FusedMap::dense() const {
  std::vector<float> out(height * width, 0.0f);
  for (int y = region.y0; y < region.y1; ++y) {
    std::copy_n(scores.begin() + static_cast<std::ptrdiff_t>(y - region.y0) * region.width(),
                region.width(), out.begin() + static_cast<std::ptrdiff_t>(y) * width + region.x0);
  }
  return out;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

FusedMap fuse_logits(const MaskedLogitStack& stack, unsigned threads) {
  if (stack.layers.empty()) throw Error(ErrorCode::kShapeMismatch, "fusion needs at least one layer");
  const Box canvas = full_canvas(stack.height, stack.width);
  if (stack.region.width() <= 0 || stack.region.height() <= 0 || !box_inside(stack.region, canvas)) {
    throw Error(ErrorCode::kShapeMismatch, "stack region is not a non-empty part of the canvas");
  }
  for (const auto& l : stack.layers) {
    if (l.values == nullptr || !box_inside(stack.region, l.extent) || !box_inside(l.extent, canvas)) {
      throw Error(ErrorCode::kShapeMismatch, "layer does not cover the stack region");
    }
  }

  FusedMap out;
  out.height = stack.height;
  out.width = stack.width;
  out.region = stack.region;
  const auto rw = static_cast<std::size_t>(stack.region.width());
  const auto rh = static_cast<std::size_t>(stack.region.height());
  out.scores.resize(rw * rh);

  parallel_for(rh, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      const std::size_t y = static_cast<std::size_t>(stack.region.y0) + r;
      float* dst = out.scores.data() + r * rw;
      for (std::size_t c = 0; c < rw; ++c) {
        const std::size_t x = static_cast<std::size_t>(stack.region.x0) + c;
        double sum_sigmoid = 0.0;
        double sum = 0.0;
        for (const auto& l : stack.layers) {
          const double v = l.at(y, x);
          sum_sigmoid += sigmoid(v);
          sum += v;
        }
        dst[c] = static_cast<float>(sum_sigmoid * sum);
      }
    }
  });
  return out;
}

void check_inputs(const ClassTaxonomy& t, const DenseLogits& semantic, const DenseLogits* parts) {
  if (semantic.channels != t.num_semantic_channels() ||
      semantic.values.size() != semantic.channels * semantic.plane_size()) {
    throw Error(ErrorCode::kShapeMismatch, "semantic logits do not match the taxonomy");
  }
  if (parts == nullptr) return;
  if (parts->channels == 0 || !t.has_background_group()) {
    throw Error(ErrorCode::kMissingBackgroundChannel, "part logits need a background channel");
  }
  if (parts->channels != t.num_part_channels() ||
      parts->values.size() != parts->channels * parts->plane_size()) {
    throw Error(ErrorCode::kShapeMismatch, "part logits do not match the taxonomy");
  }
  if (parts->height != semantic.height || parts->width != semantic.width) {
    throw Error(ErrorCode::kShapeMismatch, "semantic and part logits differ in H x W");
  }
}

std::vector<Candidate> build_thing_candidates(const CanvasInstance& inst,
                                              const DenseLogits& semantic,
                                              const DenseLogits& parts, const ClassTaxonomy& t) {
  if (!t.is_thing(inst.class_id)) {
    throw Error(ErrorCode::kNotAThingClass,
                "class " + std::to_string(inst.class_id) + " is not a thing class");
  }
  check_inputs(t, semantic, &parts);
  if (inst.canvas_height != semantic.height || inst.canvas_width != semantic.width) {
    throw Error(ErrorCode::kShapeMismatch, "instance canvas differs from the logits");
  }

  MaskedLogitStack base;
  base.height = semantic.height;
  base.width = semantic.width;
  base.region = inst.box;
  base.layers.push_back(plane_view(semantic, *t.semantic_channel(inst.class_id), LayerSource::kSemantic));
  base.layers.push_back({LayerSource::kInstance, inst.box_mask.data(),
                         static_cast<std::size_t>(inst.box.width()), inst.box});

  std::vector<Candidate> out;
  auto groups = t.class_parts(inst.class_id);
  if (groups.empty()) {
    Candidate c{{inst.class_id, inst.id, 0}, base};
    c.stack.layers.push_back(plane_view(parts, 0, LayerSource::kPart));
    out.push_back(std::move(c));
    return out;
  }
  for (std::size_t i = 0; i < groups.size(); ++i) {
    auto channel = t.group_channel(groups[i]);
    if (!channel) throw Error(ErrorCode::kInvalidTaxonomy, "unknown part group in class_parts");
    Candidate c{{inst.class_id, inst.id, static_cast<PartId>(i + 1)}, base};
    c.stack.layers.push_back(plane_view(parts, *channel, LayerSource::kPart));
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<Candidate> build_stuff_candidates(const DenseLogits& semantic,
                                              const DenseLogits& parts, const ClassTaxonomy& t) {
  check_inputs(t, semantic, &parts);
  std::vector<Candidate> out;
  const Box canvas = full_canvas(semantic.height, semantic.width);
  for (std::size_t s = 0; s < t.num_stuff(); ++s) {
    const ClassEntry& cls = t.stuff()[s];
    MaskedLogitStack base;
    base.height = semantic.height;
    base.width = semantic.width;
    base.region = canvas;
    base.layers.push_back(plane_view(semantic, s, LayerSource::kSemantic));
    if (cls.parts.empty()) {
      Candidate c{{cls.id, 0, 0}, base};
      c.stack.layers.push_back(plane_view(parts, 0, LayerSource::kPart));
      out.push_back(std::move(c));
      continue;
    }
    for (std::size_t i = 0; i < cls.parts.size(); ++i) {
      auto channel = t.group_channel(cls.parts[i]);
      if (!channel) throw Error(ErrorCode::kInvalidTaxonomy, "unknown part group in class_parts");
      Candidate c{{cls.id, 0, static_cast<PartId>(i + 1)}, base};
      c.stack.layers.push_back(plane_view(parts, *channel, LayerSource::kPart));
      out.push_back(std::move(c));
    }
  }
  return out;
}

CandidateStack assemble(std::vector<FusedCandidate> things, std::vector<FusedCandidate> stuff) {
  CandidateStack out;
  auto adopt_shape = [&](const FusedMap& m) {
    if (out.channels.empty() && out.height == 0 && out.width == 0) {
      out.height = m.height;
      out.width = m.width;
    } else if (m.height != out.height || m.width != out.width) {
      throw Error(ErrorCode::kShapeMismatch, "fused candidates differ in H x W");
    }
  };
  for (auto& s : stuff) {
    if (s.identity.instance != 0) {
      throw Error(ErrorCode::kInvalidArgument, "stuff candidate carries an instance id");
    }
    adopt_shape(s.map);
    out.identities.push_back(s.identity);
    out.channels.push_back(std::move(s.map));
  }
  out.num_stuff_channels = out.channels.size();

  std::stable_sort(things.begin(), things.end(), [](const FusedCandidate& a, const FusedCandidate& b) {
    return a.identity.instance < b.identity.instance;
  });
  InstanceId previous = 0;
  bool previous_has_parts = false;
  auto close_instance = [&] {
    if (previous == 0) return;
    ++out.num_things;
    ++(previous_has_parts ? out.num_things_p : out.num_things_np);
  };
  for (auto& c : things) {
    if (c.identity.instance == 0) {
      throw Error(ErrorCode::kInvalidArgument, "thing candidate without an instance id");
    }
    if (c.identity.instance != previous) {
      close_instance();
      previous = c.identity.instance;
      previous_has_parts = false;
    }
    previous_has_parts = previous_has_parts || c.identity.part != 0;
    adopt_shape(c.map);
    out.identities.push_back(c.identity);
    out.channels.push_back(std::move(c.map));
  }
  close_instance();
  return out;
}

std::size_t expected_candidate_count(const ClassTaxonomy& t,
                                     std::span<const CanvasInstance> instances) {
  std::size_t n = 0;
  for (const auto& s : t.stuff()) n += std::max<std::size_t>(1, s.parts.size());
  for (const auto& inst : instances) n += std::max<std::size_t>(1, t.class_parts(inst.class_id).size());
  return n;
}

void filter_small_stuff(PanopticPartMap& map, const ClassTaxonomy& t, std::size_t min_area) {
  if (min_area == 0) return;
  const std::size_t h = map.height();
  const std::size_t w = map.width();
  auto is_stuff = [&](const PanopticPartLabel& l) {
    return !l.is_void() && l.instance == 0 && t.is_stuff(l.semantic);
  };
  std::vector<char> seen(map.size(), 0);
  std::vector<std::size_t> component;
  std::vector<std::size_t> frontier;
  for (std::size_t start = 0; start < map.size(); ++start) {
    if (seen[start] || !is_stuff(map[start])) continue;
    const ClassId cls = map[start].semantic;
    component.clear();
    frontier.assign(1, start);
    seen[start] = 1;
    while (!frontier.empty()) {
      std::size_t i = frontier.back();
      frontier.pop_back();
      component.push_back(i);
      const std::size_t y = i / w;
      const std::size_t x = i % w;
      auto visit = [&](std::size_t j) {
        if (!seen[j] && is_stuff(map[j]) && map[j].semantic == cls) {
          seen[j] = 1;
          frontier.push_back(j);
        }
      };
      if (x > 0) visit(i - 1);
      if (x + 1 < w) visit(i + 1);
      if (y > 0) visit(i - w);
      if (y + 1 < h) visit(i + w);
    }
    if (component.size() < min_area) {
      for (std::size_t i : component) map[i] = PanopticPartLabel::void_label();
    }
  }
}

PanopticPartMap resolve(const CandidateStack& stack, const DenseLogits& semantic,
                        const FusionConfig& cfg, const ClassTaxonomy& t) {
  const std::size_t h = stack.height;
  const std::size_t w = stack.width;
  if (semantic.height != h || semantic.width != w || semantic.channels != t.num_semantic_channels()) {
    throw Error(ErrorCode::kShapeMismatch, "semantic logits differ from the candidate stack");
  }
  constexpr int kNone = -1;
  PanopticPartMap out(h, w);

  parallel_for(h, cfg.threads, [&](std::size_t row_begin, std::size_t row_end) {
    const std::size_t rows = row_end - row_begin;
    std::vector<float> best(rows * w, -std::numeric_limits<float>::infinity());
    std::vector<int> winner(rows * w, kNone);

    for (std::size_t c = 0; c < stack.size(); ++c) {
      const FusedMap& m = stack.channels[c];
      const auto y0 = std::max<std::size_t>(row_begin, static_cast<std::size_t>(m.region.y0));
      const auto y1 = std::min<std::size_t>(row_end, static_cast<std::size_t>(m.region.y1));
      const auto rw = static_cast<std::size_t>(m.region.width());
      for (std::size_t y = y0; y < y1; ++y) {
        const float* src = m.scores.data() + (y - m.region.y0) * rw;
        float* b = best.data() + (y - row_begin) * w + m.region.x0;
        int* win = winner.data() + (y - row_begin) * w + m.region.x0;
        for (std::size_t x = 0; x < rw; ++x) {
          if (src[x] > b[x]) {
            b[x] = src[x];
            win[x] = static_cast<int>(c);
          }
        }
      }
    }

    for (std::size_t y = row_begin; y < row_end; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        const int c = winner[(y - row_begin) * w + x];
        if (c == kNone) continue;
        if (stack.is_thing_channel(static_cast<std::size_t>(c))) {
          out.at(y, x) = stack.identities[static_cast<std::size_t>(c)];
          continue;
        }
        std::size_t best_s = 0;
        float best_v = -1.0f;
        for (std::size_t s = 0; s < t.num_stuff(); ++s) {
          const float v = semantic.at(s, y, x);
          if (v > best_v) {
            best_v = v;
            best_s = s;
          }
        }
        PanopticPartLabel label{t.stuff()[best_s].id, 0, 0};
        if (!t.stuff()[best_s].parts.empty()) {
          float best_part = -std::numeric_limits<float>::infinity();
          for (std::size_t k = 0; k < stack.num_stuff_channels; ++k) {
            const auto& id = stack.identities[k];
            if (id.semantic != label.semantic || id.part == 0) continue;
            const float v = stack.channels[k].value(y, x);
            if (v > best_part) {
              best_part = v;
              label.part = id.part;
            }
          }
        }
        out.at(y, x) = label;
      }
    }
  });

  filter_small_stuff(out, t, cfg.min_stuff_area);
  return out;
}

namespace {

std::vector<FusedCandidate> fuse_all(std::vector<Candidate> candidates, unsigned threads) {
  std::vector<FusedCandidate> out;
  out.reserve(candidates.size());
  for (auto& c : candidates) out.push_back({c.identity, fuse_logits(c.stack, threads)});
  return out;
}

}  // namespace

FusionResult fuse_canvas_instances(const DenseLogits& semantic, const DenseLogits& parts,
                                   std::vector<CanvasInstance> instances,
                                   const FusionConfig& cfg, const ClassTaxonomy& t) {
  check_inputs(t, semantic, &parts);
  std::vector<FusedCandidate> things;
  for (const auto& inst : instances) {
    auto fused = fuse_all(build_thing_candidates(inst, semantic, parts, t), cfg.threads);
    std::move(fused.begin(), fused.end(), std::back_inserter(things));
  }
  auto stuff = fuse_all(build_stuff_candidates(semantic, parts, t), cfg.threads);

  FusionResult result;
  result.candidates = assemble(std::move(things), std::move(stuff));
  if (result.candidates.size() == 0) {
    result.candidates.height = semantic.height;
    result.candidates.width = semantic.width;
  }
  if (result.candidates.size() != expected_candidate_count(t, instances)) {
    throw Error(ErrorCode::kInternal, "candidate count differs from the closed form");
  }
  result.map = resolve(result.candidates, semantic, cfg, t);
  result.instances = std::move(instances);
  return result;
}

FusionResult run_jppf(const DenseLogits& semantic, const DenseLogits& parts,
                      std::vector<InstancePrediction> raw, const FusionConfig& cfg,
                      const ClassTaxonomy& t) {
  check_inputs(t, semantic, &parts);
  auto instances = preprocess_instances(t, std::move(raw), semantic.height, semantic.width,
                                        cfg.preprocess());
  return fuse_canvas_instances(semantic, parts, std::move(instances), cfg, t);
}

PanopticPartMap jppf_pipeline(const DenseLogits& semantic, const DenseLogits& parts,
                              std::vector<InstancePrediction> raw, const FusionConfig& cfg,
                              const ClassTaxonomy& t) {
  return run_jppf(semantic, parts, std::move(raw), cfg, t).map;
}

PanopticPartMap panoptic_fuse_canvas(const DenseLogits& semantic,
                                     std::span<const CanvasInstance> instances,
                                     const FusionConfig& cfg, const ClassTaxonomy& t) {
  check_inputs(t, semantic, nullptr);
  const Box canvas = full_canvas(semantic.height, semantic.width);

  std::vector<FusedCandidate> stuff;
  for (std::size_t s = 0; s < t.num_stuff(); ++s) {
    MaskedLogitStack stack{semantic.height, semantic.width, canvas,
                           {plane_view(semantic, s, LayerSource::kSemantic)}};
    stuff.push_back({{t.stuff()[s].id, 0, 0}, fuse_logits(stack, cfg.threads)});
  }
  std::vector<FusedCandidate> things;
  for (const auto& inst : instances) {
    if (!t.is_thing(inst.class_id)) {
      throw Error(ErrorCode::kNotAThingClass,
                  "class " + std::to_string(inst.class_id) + " is not a thing class");
    }
    MaskedLogitStack stack{semantic.height, semantic.width, inst.box,
                           {plane_view(semantic, *t.semantic_channel(inst.class_id), LayerSource::kSemantic),
                            {LayerSource::kInstance, inst.box_mask.data(),
                             static_cast<std::size_t>(inst.box.width()), inst.box}}};
    things.push_back({{inst.class_id, inst.id, 0}, fuse_logits(stack, cfg.threads)});
  }
  CandidateStack candidates = assemble(std::move(things), std::move(stuff));
  candidates.height = semantic.height;
  candidates.width = semantic.width;
  return resolve(candidates, semantic, cfg, t);
}

PanopticPartMap panoptic_fuse(const DenseLogits& semantic, std::vector<InstancePrediction> raw,
                              const FusionConfig& cfg, const ClassTaxonomy& t) {
  check_inputs(t, semantic, nullptr);
  auto instances = preprocess_instances(t, std::move(raw), semantic.height, semantic.width,
                                        cfg.preprocess());
  return panoptic_fuse_canvas(semantic, instances, cfg, t);
}

}  // namespace jppf
