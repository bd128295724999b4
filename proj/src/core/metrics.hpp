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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/label.hpp"
#include "core/taxonomy.hpp"

namespace jppf {

struct MiouResult {
  // iou[c] is empty for classes absent from both maps.
  std::vector<std::optional<double>> iou;
  double mean = 0.0;
  std::size_t num_present = 0;
};

// Pixels where gt == ignore are skipped; pred == ignore counts as no class.
MiouResult miou(std::span<const std::uint32_t> pred, std::span<const std::uint32_t> gt,
                std::size_t num_classes, std::optional<std::uint32_t> ignore = std::nullopt);

// Semantic ids per pixel (VOID -> 0).
std::vector<std::uint32_t> semantic_labels(const PanopticPartMap& map);
// (s << 8 | p) per pixel where p != 0, else 0.
std::vector<std::uint32_t> part_labels(const PanopticPartMap& map);

struct Segment {
  ClassId semantic = 0;
  InstanceId instance = 0;
  std::size_t area = 0;
};

struct SegmentPair {
  std::size_t pred = 0;
  std::size_t gt = 0;
  double iou = 0.0;
};

// Indices refer to pred_segments / gt_segments.
struct SegmentMatchResult {
  std::vector<Segment> pred_segments;
  std::vector<Segment> gt_segments;
  std::vector<SegmentPair> true_positives;
  std::vector<std::size_t> false_positives;
  std::vector<std::size_t> false_negatives;
  // Unmatched predictions lying mostly (> 50 %) on gt VOID.
  std::vector<std::size_t> ignored_predictions;
};

// Segments are maximal (s, id) groups. Pairs of equal class match iff their
// IoU (gt VOID excluded from the union) is strictly above 0.5.
SegmentMatchResult match_segments(const PanopticPartMap& pred, const PanopticPartMap& gt);

struct ClassQuality {
  ClassId semantic = 0;
  bool partitionable = false;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double quality_sum = 0.0;
  double score = 0.0;
};

struct PartPqResult {
  double all = 0.0;
  double partitionable = 0.0;
  double non_partitionable = 0.0;
  std::size_t num_classes_p = 0;
  std::size_t num_classes_np = 0;
  std::vector<ClassQuality> per_class;  // classes with any segment, by id
};

// Class score Σ_TP q / (TP + FP/2 + FN/2). q is the segment IoU for
// non-partitionable classes; for partitionable classes it is the mean part
// IoU over part classes present on either side, taken over the union of the
// matched pair (falls back to segment IoU when neither side has parts).
PartPqResult part_pq(const PanopticPartMap& pred, const PanopticPartMap& gt, const ClassTaxonomy& t);

// Plain panoptic quality, averaged over classes with any segment.
double pq(const PanopticPartMap& pred, const PanopticPartMap& gt);

double density(const PanopticPartMap& map);

struct EvalReport {
  PartPqResult part_pq;
  double pq = 0.0;
  MiouResult miou_semantic;
  MiouResult miou_part;
  double density = 0.0;
};

EvalReport evaluate(const PanopticPartMap& pred, const PanopticPartMap& gt, const ClassTaxonomy& t);
std::string report_json(const EvalReport& r);
std::string report_csv(const EvalReport& r, const ClassTaxonomy& t);

}  // namespace jppf
