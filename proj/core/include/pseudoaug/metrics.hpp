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

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "pseudoaug/scene.hpp"

namespace pseudoaug {

struct PRResult {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  double precision = 1.0;  // 1 when nothing was predicted
  double recall = 1.0;     // 1 when nothing was there to find

  PRResult& operator+=(const PRResult& other);
  friend bool operator==(const PRResult&, const PRResult&) = default;
};

PRResult make_pr(std::size_t tp, std::size_t fp, std::size_t fn);

/// Point-level precision/recall. A point is predicted positive when it lies in
/// any pseudo box and actually positive when it lies in any ground-truth box.
/// True negatives are not counted.
PRResult point_precision_recall(std::span<const Point> points, std::span<const Box7> gt_boxes,
                                std::span<const Box7> pseudo_boxes);

/// Same, restricted to boxes of `object_class` on both sides (all boxes when
/// nullopt).
PRResult point_precision_recall(std::span<const Point> points, std::span<const LabeledBox> gt_boxes,
                                std::span<const LabeledBox> pseudo_boxes, std::optional<ObjectClass> object_class);

struct Detection {
  Box7 box;
  double score = 0.0;
  ObjectClass object_class = ObjectClass::vehicle;
};

struct GroundTruth {
  Box7 box;
  ObjectClass object_class = ObjectClass::vehicle;
};

std::vector<Detection> to_detections(std::span<const LabeledBox> boxes);
std::vector<GroundTruth> to_ground_truth(std::span<const LabeledBox> boxes);

/// Multi-frame AP. Each frame is matched greedily in descending score: a
/// detection takes the unmatched same-class ground truth with the highest BEV
/// IoU, provided it reaches the threshold. AP is the area under the
/// all-point precision envelope over recall.
class ApAccumulator {
 public:
  explicit ApAccumulator(double iou_threshold);

  void add_frame(std::span<const Detection> detections, std::span<const GroundTruth> gts);

  /// 0 when there is no ground truth and at least one detection; 1 when both
  /// are absent.
  double ap() const;

  std::size_t gt_count() const { return gt_count_; }
  std::size_t detection_count() const { return records_.size(); }

 private:
  struct Record {
    double score;
    bool true_positive;
  };

  double iou_threshold_;
  std::size_t gt_count_ = 0;
  std::vector<Record> records_;
};

double detection_ap(std::span<const Detection> detections, std::span<const GroundTruth> gts, double iou_threshold);

/// One ApAccumulator per class. Classes absent from both sides are not
/// reported.
class ClassApAccumulator {
 public:
  explicit ClassApAccumulator(double iou_threshold) : iou_threshold_(iou_threshold) {}

  void add_frame(std::span<const Detection> detections, std::span<const GroundTruth> gts);
  std::map<ObjectClass, double> ap() const;

 private:
  double iou_threshold_;
  std::map<ObjectClass, ApAccumulator> per_class_;
};

}  // namespace pseudoaug
