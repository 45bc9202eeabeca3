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

#include "pseudoaug/scene.hpp"

#include <algorithm>

#include "pseudoaug/error.hpp"

namespace pseudoaug {

std::string_view to_string(ObjectClass c) {
  switch (c) {
    case ObjectClass::vehicle: return "vehicle";
    case ObjectClass::pedestrian: return "pedestrian";
    case ObjectClass::cyclist: return "cyclist";
    case ObjectClass::other: return "other";
  }
  return "other";
}

std::optional<ObjectClass> parse_object_class(std::string_view name) {
  for (std::size_t i = 0; i < kObjectClassCount; ++i) {
    const auto c = static_cast<ObjectClass>(i);
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

std::string_view to_string(SceneSource s) {
  switch (s) {
    case SceneSource::labeled: return "labeled";
    case SceneSource::pseudo: return "pseudo";
    case SceneSource::fused: return "fused";
  }
  return "labeled";
}

void validate(const Scene& scene) {
  if (scene.frame_id.empty()) throw Error("scene has an empty frame_id");
  for (const Point& p : scene.points) {
    if (!is_finite(p)) throw Error("scene " + scene.frame_id + " has a non-finite point");
  }
  for (const LabeledBox& b : scene.boxes) {
    if (!is_valid(b.geometry)) throw Error("scene " + scene.frame_id + " has an invalid box");
    if (b.source == BoxSource::ground_truth && b.score != 1.0) {
      throw Error("scene " + scene.frame_id + " has a ground-truth box with score != 1");
    }
    if (!(b.score >= 0.0 && b.score <= 1.0)) {
      throw Error("scene " + scene.frame_id + " has a box score outside [0, 1]");
    }
  }
}

std::vector<Box7> box_geometries(std::span<const LabeledBox> boxes) {
  std::vector<Box7> out;
  out.reserve(boxes.size());
  for (const LabeledBox& b : boxes) out.push_back(b.geometry);
  return out;
}

Scene transform_scene(Scene scene, const SceneTransform& op) {
  for (Point& p : scene.points) p = apply_transform(op, p);
  for (LabeledBox& b : scene.boxes) b.geometry = apply_transform(op, b.geometry);
  return scene;
}

std::vector<Point> ObjectCrop::world_points(const Box7& pose) const {
  std::vector<Point> out;
  out.reserve(points.size());
  for (const Point& p : points) out.push_back(from_box_frame(p, pose));
  return out;
}

ObjectCrop make_crop(const LabeledBox& box, std::span<const Point> world_points, std::string source_frame_id) {
  ObjectCrop crop;
  crop.box = box;
  crop.source_frame_id = std::move(source_frame_id);
  crop.points.reserve(world_points.size());
  for (const Point& p : world_points) crop.points.push_back(to_box_frame(p, box.geometry));
  return crop;
}

std::vector<ObjectCrop> extract_crops(const Scene& scene) {
  std::vector<ObjectCrop> crops;
  crops.reserve(scene.boxes.size());
  std::vector<Point> inside;
  for (const LabeledBox& box : scene.boxes) {
    inside.clear();
    for (const Point& p : scene.points) {
      if (point_in_box(p, box.geometry)) inside.push_back(p);
    }
    crops.push_back(make_crop(box, inside, scene.frame_id));
  }
  return crops;
}

ForegroundSplit split_foreground_background(const Scene& scene, double score_threshold) {
  std::vector<std::size_t> kept;
  std::vector<Box7> geometry;
  for (std::size_t i = 0; i < scene.boxes.size(); ++i) {
    if (scene.boxes[i].score >= score_threshold) {
      kept.push_back(i);
      geometry.push_back(scene.boxes[i].geometry);
    }
  }

  const std::vector<int> assignment = assign_points_to_boxes(scene.points, geometry);
  std::vector<std::vector<Point>> members(kept.size());
  ForegroundSplit split;
  for (std::size_t i = 0; i < scene.points.size(); ++i) {
    if (assignment[i] == kNoBox) {
      split.background.push_back(scene.points[i]);
    } else {
      members[static_cast<std::size_t>(assignment[i])].push_back(scene.points[i]);
    }
  }
  split.crops.reserve(kept.size());
  for (std::size_t k = 0; k < kept.size(); ++k) {
    split.crops.push_back(make_crop(scene.boxes[kept[k]], members[k], scene.frame_id));
  }
  return split;
}

std::size_t PseudoDatabase::crop_count() const {
  std::size_t n = 0;
  for (const auto& [cls, list] : crops) n += list.size();
  return n;
}

std::vector<const ObjectCrop*> db_sample_crops(const PseudoDatabase& db, std::optional<ObjectClass> object_class,
                                               std::size_t count, double min_score, Rng& rng) {
  std::vector<const ObjectCrop*> pool;
  for (const auto& [cls, list] : db.crops) {
    if (object_class && cls != *object_class) continue;
    for (const ObjectCrop& crop : list) {
      if (crop.box.score >= min_score) pool.push_back(&crop);
    }
  }
  // Partial Fisher-Yates: the first `take` slots are a uniform sample in
  // uniformly random order.
  const std::size_t take = std::min(count, pool.size());
  for (std::size_t i = 0; i < take; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(take);
  return pool;
}

void PseudoDatabaseBuilder::add_frame(Scene frame) {
  for (ObjectCrop& crop : extract_crops(frame)) add_crop(std::move(crop));
  db_.frames.push_back(std::move(frame));
}

void PseudoDatabaseBuilder::add_crop(ObjectCrop crop) {
  const ObjectClass cls = crop.box.object_class;
  db_.crops[cls].push_back(std::move(crop));
}

PseudoDatabaseStore::PseudoDatabaseStore() : current_(std::make_shared<const PseudoDatabase>()) {}

std::shared_ptr<const PseudoDatabase> PseudoDatabaseStore::snapshot() const {
  std::lock_guard lock(mutex_);
  return current_;
}

void PseudoDatabaseStore::publish(PseudoDatabase next) {
  auto fresh = std::make_shared<const PseudoDatabase>(std::move(next));
  std::lock_guard lock(mutex_);
  if (fresh->generation <= current_->generation) {
    throw Error("pseudo database generation must increase: " + std::to_string(fresh->generation) +
                " <= " + std::to_string(current_->generation));
  }
  current_ = std::move(fresh);
}

int PseudoDatabaseStore::generation() const {
  std::lock_guard lock(mutex_);
  return current_->generation;
}

}  // namespace pseudoaug
