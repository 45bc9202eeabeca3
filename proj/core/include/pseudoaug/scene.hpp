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

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pseudoaug/geom.hpp"
#include "pseudoaug/random.hpp"

namespace pseudoaug {

enum class ObjectClass : std::uint8_t { vehicle = 0, pedestrian = 1, cyclist = 2, other = 3 };
inline constexpr std::size_t kObjectClassCount = 4;

/// Where a box came from.
enum class BoxSource : std::uint8_t { ground_truth = 0, pseudo = 1 };

/// Where a frame came from. `fused` marks frames produced by mixing labeled
/// and pseudo-labeled content.
enum class SceneSource : std::uint8_t { labeled = 0, pseudo = 1, fused = 2 };

std::string_view to_string(ObjectClass c);
std::optional<ObjectClass> parse_object_class(std::string_view name);
std::string_view to_string(SceneSource s);

struct LabeledBox {
  Box7 geometry;
  ObjectClass object_class = ObjectClass::vehicle;
  double score = 1.0;
  BoxSource source = BoxSource::ground_truth;

  friend bool operator==(const LabeledBox&, const LabeledBox&) = default;
};

struct Scene {
  std::string frame_id;
  std::vector<Point> points;
  std::vector<LabeledBox> boxes;
  SceneSource source = SceneSource::labeled;

  friend bool operator==(const Scene&, const Scene&) = default;
};

/// Throws Error when the frame id is empty, a point is non-finite, a box is
/// invalid, or a score violates its provenance rule.
void validate(const Scene& scene);

std::vector<Box7> box_geometries(std::span<const LabeledBox> boxes);

/// Applies a rigid/scaling transform to every point and box of a scene.
Scene transform_scene(Scene scene, const SceneTransform& op);

/// A labeled box plus the points it contained, stored in the box's canonical
/// frame so the object can be re-posed with a rigid transform.
struct ObjectCrop {
  LabeledBox box;
  std::vector<Point> points;
  std::string source_frame_id;

  /// Points mapped back through `pose`.
  std::vector<Point> world_points(const Box7& pose) const;
  std::vector<Point> world_points() const { return world_points(box.geometry); }
};

ObjectCrop make_crop(const LabeledBox& box, std::span<const Point> world_points, std::string source_frame_id);

/// One crop per box holding every scene point inside that box (crops of
/// overlapping boxes may share points).
std::vector<ObjectCrop> extract_crops(const Scene& scene);

struct ForegroundSplit {
  std::vector<ObjectCrop> crops;
  std::vector<Point> background;
};

/// Partitions the scene against the boxes whose score is >= `score_threshold`.
/// Each contained point goes to the lowest-index such box; everything else is
/// background. Crops are emitted in box order.
ForegroundSplit split_foreground_background(const Scene& scene, double score_threshold);

/// One generation of pseudo-labeled frames and their object crops.
/// Instances are immutable once published through PseudoDatabaseStore.
struct PseudoDatabase {
  int generation = -1;
  std::vector<Scene> frames;
  std::map<ObjectClass, std::vector<ObjectCrop>> crops;

  std::size_t crop_count() const;
  bool empty() const { return frames.empty() && crop_count() == 0; }
};

/// Uniform sample without replacement of crops of `object_class` (any class
/// when nullopt) whose score is >= `min_score`. Returns the whole pool, in
/// random order, when it holds fewer than `count` crops. Pointers refer into
/// `db`.
std::vector<const ObjectCrop*> db_sample_crops(const PseudoDatabase& db, std::optional<ObjectClass> object_class,
                                               std::size_t count, double min_score, Rng& rng);

/// Accumulates one generation. `add_frame` stores the frame and registers
/// one crop per box.
class PseudoDatabaseBuilder {
 public:
  explicit PseudoDatabaseBuilder(int generation) { db_.generation = generation; }

  void add_frame(Scene frame);
  void add_crop(ObjectCrop crop);

  std::size_t frame_count() const { return db_.frames.size(); }
  PseudoDatabase build() && { return std::move(db_); }

 private:
  PseudoDatabase db_;
};

/// Single-writer, many-reader holder. Readers take a snapshot and keep it for
/// as long as they need; `publish` swaps in a whole generation at once.
class PseudoDatabaseStore {
 public:
  PseudoDatabaseStore();

  std::shared_ptr<const PseudoDatabase> snapshot() const;

  /// Throws Error unless `next.generation` exceeds the current generation.
  void publish(PseudoDatabase next);

  int generation() const;

 private:
  mutable std::mutex mutex_;
  std::shared_ptr<const PseudoDatabase> current_;
};

}  // namespace pseudoaug
