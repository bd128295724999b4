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

#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "core/error.hpp"
#include "synth/scene.hpp"

namespace jppf::synth {

namespace {

float fused_score(const std::vector<float>& layers) {
  double sigmoids = 0.0;
  double total = 0.0;
  for (float v : layers) {
    sigmoids += 1.0 / (1.0 + std::exp(-static_cast<double>(v)));
    total += v;
  }
  return static_cast<float>(sigmoids * total);
}

float semantic_at(const DenseLogits& s, const ClassTaxonomy& t, ClassId c, std::size_t y, std::size_t x) {
  return s.at(*t.semantic_channel(c), y, x);
}

float part_at(const DenseLogits& p, const ClassTaxonomy& t, PartGroupId g, std::size_t y, std::size_t x) {
  return p.at(*t.group_channel(g), y, x);
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

}  // namespace

PanopticPartMap oracle_fuse(const DenseLogits& semantic, const DenseLogits& parts,
                            const std::vector<CanvasInstance>& instances, const FusionConfig& cfg,
                            const ClassTaxonomy& t) {
  const std::size_t h = semantic.height;
  const std::size_t w = semantic.width;
  PanopticPartMap out(h, w);
  const PartGroupId background = t.part_groups().at(0).id;

  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      bool have = false;
      float best = 0.0f;
      PanopticPartLabel winner;
      bool winner_is_thing = false;
      auto offer = [&](float score, PanopticPartLabel label, bool thing) {
        if (!have || score > best) {
          have = true;
          best = score;
          winner = label;
          winner_is_thing = thing;
        }
      };

      for (const auto& cls : t.stuff()) {
        const float s = semantic_at(semantic, t, cls.id, y, x);
        if (cls.parts.empty()) {
          offer(fused_score({s, part_at(parts, t, background, y, x)}), {cls.id, 0, 0}, false);
        } else {
          for (std::size_t k = 0; k < cls.parts.size(); ++k) {
            offer(fused_score({s, part_at(parts, t, cls.parts[k], y, x)}),
                  {cls.id, 0, static_cast<PartId>(k + 1)}, false);
          }
        }
      }
      for (const auto& inst : instances) {
        const bool inside = static_cast<int>(x) >= inst.box.x0 && static_cast<int>(x) < inst.box.x1 &&
                            static_cast<int>(y) >= inst.box.y0 && static_cast<int>(y) < inst.box.y1;
        if (!inside) continue;
        const float s = semantic_at(semantic, t, inst.class_id, y, x);
        const float m = inst.box_mask[(y - inst.box.y0) * inst.box.width() + (x - inst.box.x0)];
        const auto& cls = *t.find_class(inst.class_id);
        if (cls.parts.empty()) {
          offer(fused_score({s, m, part_at(parts, t, background, y, x)}), {inst.class_id, inst.id, 0}, true);
        } else {
          for (std::size_t k = 0; k < cls.parts.size(); ++k) {
            offer(fused_score({s, m, part_at(parts, t, cls.parts[k], y, x)}),
                  {inst.class_id, inst.id, static_cast<PartId>(k + 1)}, true);
          }
        }
      }

      if (!have) continue;
      if (winner_is_thing) {
        out.at(y, x) = winner;
        continue;
      }
      // Stuff identity comes from the raw semantic map.
      const ClassEntry* pick = nullptr;
      float pick_score = 0.0f;
      for (const auto& cls : t.stuff()) {
        const float s = semantic_at(semantic, t, cls.id, y, x);
        if (pick == nullptr || s > pick_score) {
          pick = &cls;
          pick_score = s;
        }
      }
      PanopticPartLabel label{pick->id, 0, 0};
      if (!pick->parts.empty()) {
        float part_best = 0.0f;
        bool part_have = false;
        for (std::size_t k = 0; k < pick->parts.size(); ++k) {
          const float v = fused_score(
              {semantic_at(semantic, t, pick->id, y, x), part_at(parts, t, pick->parts[k], y, x)});
          if (!part_have || v > part_best) {
            part_have = true;
            part_best = v;
            label.part = static_cast<PartId>(k + 1);
          }
        }
      }
      out.at(y, x) = label;
    }
  }

  if (cfg.min_stuff_area == 0) return out;
  // Union-find over 4-connected pixels sharing a stuff class.
  std::vector<std::size_t> parent(h * w);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto stuff_class = [&](std::size_t i) -> ClassId {
    const auto& l = out[i];
    return (!l.is_void() && l.instance == 0 && t.is_stuff(l.semantic)) ? l.semantic : 0;
  };
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t i = y * w + x;
      const ClassId c = stuff_class(i);
      if (c == 0) continue;
      if (x + 1 < w && stuff_class(i + 1) == c) parent[find_root(parent, i + 1)] = find_root(parent, i);
      if (y + 1 < h && stuff_class(i + w) == c) parent[find_root(parent, i + w)] = find_root(parent, i);
    }
  }
  std::vector<std::size_t> area(h * w, 0);
  for (std::size_t i = 0; i < h * w; ++i) {
    if (stuff_class(i) != 0) ++area[find_root(parent, i)];
  }
  PanopticPartMap filtered = out;
  for (std::size_t i = 0; i < h * w; ++i) {
    if (stuff_class(i) != 0 && area[find_root(parent, i)] < cfg.min_stuff_area) {
      filtered[i] = PanopticPartLabel::void_label();
    }
  }
  return filtered;
}

}  // namespace jppf::synth
