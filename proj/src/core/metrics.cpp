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

#include "core/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "core/error.hpp"

namespace jppf {

MiouResult miou(std::span<const std::uint32_t> pred, std::span<const std::uint32_t> gt,
                std::size_t num_classes, std::optional<std::uint32_t> ignore) {
  if (pred.size() != gt.size()) throw Error(ErrorCode::kShapeMismatch, "miou: maps differ in size");
  std::vector<std::size_t> inter(num_classes, 0);
  std::vector<std::size_t> pred_count(num_classes, 0);
  std::vector<std::size_t> gt_count(num_classes, 0);
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (ignore && gt[i] == *ignore) continue;
    if (gt[i] >= num_classes || (pred[i] >= num_classes && !(ignore && pred[i] == *ignore))) {
      throw Error(ErrorCode::kInvalidArgument, "miou: label outside [0, num_classes)");
    }
    ++gt_count[gt[i]];
    if (ignore && pred[i] == *ignore) continue;
    ++pred_count[pred[i]];
    if (pred[i] == gt[i]) ++inter[gt[i]];
  }
  MiouResult out;
  out.iou.resize(num_classes);
  double sum = 0.0;
  for (std::size_t c = 0; c < num_classes; ++c) {
    const std::size_t uni = pred_count[c] + gt_count[c] - inter[c];
    if (uni == 0) continue;
    out.iou[c] = static_cast<double>(inter[c]) / static_cast<double>(uni);
    sum += *out.iou[c];
    ++out.num_present;
  }
  out.mean = out.num_present > 0 ? sum / static_cast<double>(out.num_present) : 0.0;
  return out;
}

std::vector<std::uint32_t> semantic_labels(const PanopticPartMap& map) {
  std::vector<std::uint32_t> out(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) out[i] = map[i].semantic;
  return out;
}

std::vector<std::uint32_t> part_labels(const PanopticPartMap& map) {
  std::vector<std::uint32_t> out(map.size(), 0);
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (map[i].part != 0) out[i] = (map[i].semantic << 8) | map[i].part;
  }
  return out;
}

namespace {

constexpr std::size_t kNoSegment = static_cast<std::size_t>(-1);

struct SegmentIndex {
  std::vector<Segment> segments;
  std::vector<std::size_t> of_pixel;
};

SegmentIndex index_segments(const PanopticPartMap& map) {
  SegmentIndex out;
  out.of_pixel.assign(map.size(), kNoSegment);
  std::map<std::pair<ClassId, InstanceId>, std::size_t> ids;
  for (std::size_t i = 0; i < map.size(); ++i) {
    const auto& l = map[i];
    if (l.is_void()) continue;
    auto [it, inserted] = ids.try_emplace({l.semantic, l.instance}, out.segments.size());
    if (inserted) out.segments.push_back({l.semantic, l.instance, 0});
    ++out.segments[it->second].area;
    out.of_pixel[i] = it->second;
  }
  return out;
}

struct MatchState {
  SegmentIndex pred;
  SegmentIndex gt;
  SegmentMatchResult result;
};

MatchState match(const PanopticPartMap& pred, const PanopticPartMap& gt) {
  if (pred.height() != gt.height() || pred.width() != gt.width()) {
    throw Error(ErrorCode::kShapeMismatch, "prediction and ground truth differ in shape");
  }
  MatchState st{index_segments(pred), index_segments(gt), {}};
  const std::size_t np = st.pred.segments.size();
  const std::size_t ng = st.gt.segments.size();

  std::map<std::pair<std::size_t, std::size_t>, std::size_t> inter;
  std::vector<std::size_t> void_overlap(np, 0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const std::size_t p = st.pred.of_pixel[i];
    if (p == kNoSegment) continue;
    const std::size_t g = st.gt.of_pixel[i];
    if (g == kNoSegment) {
      if (gt[i].is_void()) ++void_overlap[p];
      continue;
    }
    ++inter[{p, g}];
  }

  std::vector<char> pred_matched(np, 0);
  std::vector<char> gt_matched(ng, 0);
  for (const auto& [key, count] : inter) {
    const auto [p, g] = key;
    const Segment& ps = st.pred.segments[p];
    const Segment& gs = st.gt.segments[g];
    if (ps.semantic != gs.semantic) continue;
    const std::size_t uni = ps.area + gs.area - count - void_overlap[p];
    const double iou = static_cast<double>(count) / static_cast<double>(uni);
    if (iou > 0.5) {
      st.result.true_positives.push_back({p, g, iou});
      pred_matched[p] = 1;
      gt_matched[g] = 1;
    }
  }
  for (std::size_t g = 0; g < ng; ++g) {
    if (!gt_matched[g]) st.result.false_negatives.push_back(g);
  }
  for (std::size_t p = 0; p < np; ++p) {
    if (pred_matched[p]) continue;
    if (2 * void_overlap[p] > st.pred.segments[p].area) {
      st.result.ignored_predictions.push_back(p);
    } else {
      st.result.false_positives.push_back(p);
    }
  }
  st.result.pred_segments = st.pred.segments;
  st.result.gt_segments = st.gt.segments;
  return st;
}

// Mean part IoU of each true positive pair over the union of its two segments.
std::vector<std::optional<double>> part_qualities(const MatchState& st, const PanopticPartMap& pred,
                                                  const PanopticPartMap& gt) {
  const auto& tps = st.result.true_positives;
  std::vector<std::size_t> pair_of_pred(st.pred.segments.size(), kNoSegment);
  std::vector<std::size_t> pair_of_gt(st.gt.segments.size(), kNoSegment);
  for (std::size_t k = 0; k < tps.size(); ++k) {
    pair_of_pred[tps[k].pred] = k;
    pair_of_gt[tps[k].gt] = k;
  }
  struct Counts {
    std::map<PartId, std::size_t> pred;
    std::map<PartId, std::size_t> gt;
    std::map<PartId, std::size_t> inter;
  };
  std::vector<Counts> counts(tps.size());
  auto accumulate = [&](std::size_t k, std::size_t i) {
    const bool in_pred = st.pred.of_pixel[i] == tps[k].pred;
    const bool in_gt = st.gt.of_pixel[i] == tps[k].gt;
    const PartId pp = in_pred ? pred[i].part : 0;
    const PartId gp = in_gt ? gt[i].part : 0;
    if (pp != 0) ++counts[k].pred[pp];
    if (gp != 0) ++counts[k].gt[gp];
    if (pp != 0 && pp == gp) ++counts[k].inter[pp];
  };
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const std::size_t p = st.pred.of_pixel[i];
    const std::size_t g = st.gt.of_pixel[i];
    const std::size_t kp = p == kNoSegment ? kNoSegment : pair_of_pred[p];
    const std::size_t kg = g == kNoSegment ? kNoSegment : pair_of_gt[g];
    if (kp != kNoSegment) accumulate(kp, i);
    if (kg != kNoSegment && kg != kp) accumulate(kg, i);
  }

  std::vector<std::optional<double>> out(tps.size());
  for (std::size_t k = 0; k < tps.size(); ++k) {
    std::map<PartId, char> present;
    for (const auto& [part, n] : counts[k].pred) present[part] = 1;
    for (const auto& [part, n] : counts[k].gt) present[part] = 1;
    if (present.empty()) continue;
    double sum = 0.0;
    for (const auto& [part, unused] : present) {
      const std::size_t a = counts[k].pred.count(part) ? counts[k].pred.at(part) : 0;
      const std::size_t b = counts[k].gt.count(part) ? counts[k].gt.at(part) : 0;
      const std::size_t i = counts[k].inter.count(part) ? counts[k].inter.at(part) : 0;
      sum += static_cast<double>(i) / static_cast<double>(a + b - i);
    }
    out[k] = sum / static_cast<double>(present.size());
  }
  return out;
}

std::map<ClassId, ClassQuality> tally(const SegmentMatchResult& r) {
  std::map<ClassId, ClassQuality> per_class;
  auto entry = [&](ClassId s) -> ClassQuality& {
    auto& q = per_class[s];
    q.semantic = s;
    return q;
  };
  for (const auto& tp : r.true_positives) ++entry(r.gt_segments[tp.gt].semantic).tp;
  for (std::size_t p : r.false_positives) ++entry(r.pred_segments[p].semantic).fp;
  for (std::size_t g : r.false_negatives) ++entry(r.gt_segments[g].semantic).fn;
  return per_class;
}

double class_score(const ClassQuality& q) {
  const double denom = static_cast<double>(q.tp) + 0.5 * static_cast<double>(q.fp) +
                       0.5 * static_cast<double>(q.fn);
  return denom > 0.0 ? q.quality_sum / denom : 0.0;
}

}  // namespace

SegmentMatchResult match_segments(const PanopticPartMap& pred, const PanopticPartMap& gt) {
  return match(pred, gt).result;
}

PartPqResult part_pq(const PanopticPartMap& pred, const PanopticPartMap& gt, const ClassTaxonomy& t) {
  MatchState st = match(pred, gt);
  const auto& r = st.result;
  auto per_class = tally(r);
  auto part_q = part_qualities(st, pred, gt);
  for (std::size_t k = 0; k < r.true_positives.size(); ++k) {
    const auto& tp = r.true_positives[k];
    const ClassId s = r.gt_segments[tp.gt].semantic;
    const bool partitionable = t.is_partitionable(s);
    per_class[s].quality_sum += (partitionable && part_q[k]) ? *part_q[k] : tp.iou;
  }

  PartPqResult out;
  double sum_all = 0.0;
  double sum_p = 0.0;
  double sum_np = 0.0;
  for (auto& [s, q] : per_class) {
    q.partitionable = t.is_partitionable(s);
    q.score = class_score(q);
    sum_all += q.score;
    if (q.partitionable) {
      sum_p += q.score;
      ++out.num_classes_p;
    } else {
      sum_np += q.score;
      ++out.num_classes_np;
    }
    out.per_class.push_back(q);
  }
  if (!per_class.empty()) out.all = sum_all / static_cast<double>(per_class.size());
  if (out.num_classes_p > 0) out.partitionable = sum_p / static_cast<double>(out.num_classes_p);
  if (out.num_classes_np > 0) {
    out.non_partitionable = sum_np / static_cast<double>(out.num_classes_np);
  }
  return out;
}

double pq(const PanopticPartMap& pred, const PanopticPartMap& gt) {
  SegmentMatchResult r = match_segments(pred, gt);
  auto per_class = tally(r);
  for (const auto& tp : r.true_positives) per_class[r.gt_segments[tp.gt].semantic].quality_sum += tp.iou;
  if (per_class.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [s, q] : per_class) sum += class_score(q);
  return sum / static_cast<double>(per_class.size());
}

double density(const PanopticPartMap& map) {
  if (map.size() == 0) return 0.0;
  std::size_t filled = 0;
  for (const auto& l : map.labels()) filled += l.is_void() ? 0 : 1;
  return static_cast<double>(filled) / static_cast<double>(map.size());
}

EvalReport evaluate(const PanopticPartMap& pred, const PanopticPartMap& gt, const ClassTaxonomy& t) {
  EvalReport r;
  r.part_pq = part_pq(pred, gt, t);
  r.pq = pq(pred, gt);
  r.miou_semantic = miou(semantic_labels(pred), semantic_labels(gt), kMaxSemantic + 1, 0);
  r.miou_part = miou(part_labels(pred), part_labels(gt), (kMaxSemantic + 1) << 8, 0);
  r.density = density(pred);
  return r;
}

std::string report_json(const EvalReport& r) {
  nlohmann::ordered_json doc;
  // Averages over an empty set are reported as null.
  auto defined = [](double v, std::size_t n) { return n > 0 ? nlohmann::json(v) : nlohmann::json(nullptr); };
  const std::size_t n_all = r.part_pq.num_classes_p + r.part_pq.num_classes_np;
  doc["PartPQ"] = {{"All", defined(r.part_pq.all, n_all)},
                   {"P", defined(r.part_pq.partitionable, r.part_pq.num_classes_p)},
                   {"NP", defined(r.part_pq.non_partitionable, r.part_pq.num_classes_np)}};
  doc["PQ"] = defined(r.pq, n_all);
  doc["mIoU_semantic"] = defined(r.miou_semantic.mean, r.miou_semantic.num_present);
  doc["mIoU_part"] = defined(r.miou_part.mean, r.miou_part.num_present);
  doc["density"] = r.density;
  return doc.dump(2);
}

std::string report_csv(const EvalReport& r, const ClassTaxonomy& t) {
  std::ostringstream out;
  out << "class_id,name,partitionable,tp,fp,fn,score,iou\n";
  out << std::setprecision(10);
  for (const auto& q : r.part_pq.per_class) {
    out << q.semantic << ',' << t.class_name(q.semantic) << ',' << (q.partitionable ? 1 : 0) << ','
        << q.tp << ',' << q.fp << ',' << q.fn << ',' << q.score << ',';
    if (q.semantic < r.miou_semantic.iou.size() && r.miou_semantic.iou[q.semantic]) {
      out << *r.miou_semantic.iou[q.semantic];
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace jppf
