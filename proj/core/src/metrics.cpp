// Copyright 2026 The pseudoaug Authors
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

#include "pseudoaug/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "pseudoaug/error.hpp"

namespace pseudoaug {

PRResult make_pr(std::size_t tp, std::size_t fp, std::size_t fn) {
  PRResult r;
  r.true_positives = tp;
  r.false_positives = fp;
  r.false_negatives = fn;
  r.precision = tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  r.recall = tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  return r;
}

PRResult& PRResult::operator+=(const PRResult& other) {
  *this = make_pr(true_positives + other.true_positives, false_positives + other.false_positives,
                  false_negatives + other.false_negatives);
  return *this;
}

PRResult point_precision_recall(std::span<const Point> points, std::span<const Box7> gt_boxes,
                                std::span<const Box7> pseudo_boxes) {
  const std::vector<int> in_gt = assign_points_to_boxes(points, gt_boxes);
  const std::vector<int> in_pseudo = assign_points_to_boxes(points, pseudo_boxes);
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const bool actual = in_gt[i] != kNoBox;
    const bool predicted = in_pseudo[i] != kNoBox;
    if (actual && predicted) ++tp;
    else if (predicted) ++fp;
    else if (actual) ++fn;
  }
  return make_pr(tp, fp, fn);
}

PRResult point_precision_recall(std::span<const Point> points, std::span<const LabeledBox> gt_boxes,
                                std::span<const LabeledBox> pseudo_boxes, std::optional<ObjectClass> object_class) {
  auto select = [&](std::span<const LabeledBox> boxes) {
    std::vector<Box7> out;
    for (const LabeledBox& b : boxes) {
      if (!object_class || b.object_class == *object_class) out.push_back(b.geometry);
    }
    return out;
  };
  const std::vector<Box7> gt = select(gt_boxes);
  const std::vector<Box7> pseudo = select(pseudo_boxes);
  return point_precision_recall(points, gt, pseudo);
}

std::vector<Detection> to_detections(std::span<const LabeledBox> boxes) {
  std::vector<Detection> out;
  out.reserve(boxes.size());
  for (const LabeledBox& b : boxes) out.push_back({b.geometry, b.score, b.object_class});
  return out;
}

std::vector<GroundTruth> to_ground_truth(std::span<const LabeledBox> boxes) {
  std::vector<GroundTruth> out;
  out.reserve(boxes.size());
  for (const LabeledBox& b : boxes) out.push_back({b.geometry, b.object_class});
  return out;
}

ApAccumulator::ApAccumulator(double iou_threshold) : iou_threshold_(iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) throw ConfigError("iou_threshold", "must lie in (0, 1)");
}

void ApAccumulator::add_frame(std::span<const Detection> detections, std::span<const GroundTruth> gts) {
  gt_count_ += gts.size();
  std::vector<std::size_t> order(detections.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return detections[a].score > detections[b].score; });

  std::vector<bool> matched(gts.size(), false);
  for (std::size_t d : order) {
    const Detection& det = detections[d];
    double best_iou = 0.0;
    std::size_t best = gts.size();
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (matched[g] || gts[g].object_class != det.object_class) continue;
      const double iou = bev_iou(det.box, gts[g].box);
      if (iou >= iou_threshold_ && iou > best_iou) {
        best_iou = iou;
        best = g;
      }
    }
    if (best < gts.size()) matched[best] = true;
    records_.push_back({det.score, best < gts.size()});
  }
}

double ApAccumulator::ap() const {
  if (gt_count_ == 0) return records_.empty() ? 1.0 : 0.0;
  std::vector<Record> sorted = records_;
  std::stable_sort(sorted.begin(), sorted.end(), [](const Record& a, const Record& b) { return a.score > b.score; });

  // Recall only moves at true positives, by 1 / gt_count each, so the area
  // is the mean enveloped precision over true positives. Extended precision
  // keeps small cases correctly rounded.
  std::vector<long double> precision(sorted.size());
  std::size_t tp = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i].true_positive) ++tp;
    precision[i] = static_cast<long double>(tp) / static_cast<long double>(i + 1);
  }
  for (std::size_t i = sorted.size(); i-- > 1;) precision[i - 1] = std::max(precision[i - 1], precision[i]);

  long double sum = 0.0L;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i].true_positive) sum += precision[i];
  }
  return static_cast<double>(sum / static_cast<long double>(gt_count_));
}

double detection_ap(std::span<const Detection> detections, std::span<const GroundTruth> gts, double iou_threshold) {
  ApAccumulator acc(iou_threshold);
  acc.add_frame(detections, gts);
  return acc.ap();
}

void ClassApAccumulator::add_frame(std::span<const Detection> detections, std::span<const GroundTruth> gts) {
  std::map<ObjectClass, std::pair<std::vector<Detection>, std::vector<GroundTruth>>> split;
  for (const Detection& d : detections) split[d.object_class].first.push_back(d);
  for (const GroundTruth& g : gts) split[g.object_class].second.push_back(g);
  for (auto& [cls, parts] : split) {
    auto it = per_class_.try_emplace(cls, iou_threshold_).first;
    it->second.add_frame(parts.first, parts.second);
  }
}

std::map<ObjectClass, double> ClassApAccumulator::ap() const {
  std::map<ObjectClass, double> out;
  for (const auto& [cls, acc] : per_class_) out[cls] = acc.ap();
  return out;
}

}  // namespace pseudoaug
