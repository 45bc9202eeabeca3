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

#include "pseudoaug/policies_pseudo.hpp"

#include "pseudoaug/error.hpp"

namespace pseudoaug {

namespace {

bool inside_any(const Point& p, std::span<const Box7> boxes) {
  for (const Box7& b : boxes) {
    if (point_in_box(p, b)) return true;
  }
  return false;
}

}  // namespace

Scene pseudo_frame(const Scene& frame, const PseudoFrameParams& params, Rng& rng) {
  if (!bernoulli(rng, params.probability)) return frame;

  std::vector<Box7> kept;
  std::vector<Box7> dropped;
  Scene out;
  out.frame_id = frame.frame_id;
  out.source = frame.source;
  for (const LabeledBox& b : frame.boxes) {
    if (b.score >= params.score_threshold) {
      kept.push_back(b.geometry);
      out.boxes.push_back(b);
    } else {
      dropped.push_back(b.geometry);
    }
  }
  if (dropped.empty()) return frame;

  out.points.reserve(frame.points.size());
  for (const Point& p : frame.points) {
    if (inside_any(p, dropped) && !inside_any(p, kept)) continue;
    out.points.push_back(p);
  }
  return out;
}

PasteOutcome paste_objects(const Scene& scene, const PseudoDatabase& db, std::size_t num_objects, double min_score,
                           std::optional<ObjectClass> object_class, Rng& rng, double position_jitter) {
  PasteOutcome outcome{scene, 0, 0, GroundPlane{}};
  if (num_objects == 0) return outcome;

  const std::vector<const ObjectCrop*> candidates =
      db_sample_crops(db, object_class, kPasteOversampling * num_objects, min_score, rng);
  if (candidates.empty()) return outcome;

  const std::vector<Box7> existing = box_geometries(scene.boxes);
  outcome.plane = estimate_ground_plane(existing, scene.points);

  // Candidates arrive shuffled; accept greedily in that order.
  std::vector<Box7> accepted_poses;
  std::vector<const ObjectCrop*> accepted;
  for (const ObjectCrop* crop : candidates) {
    if (accepted.size() == num_objects) break;
    Box7 pose = crop->box.geometry;
    if (position_jitter > 0.0) {
      pose.cx += position_jitter * standard_normal(rng);
      pose.cy += position_jitter * standard_normal(rng);
    }
    pose.cz = outcome.plane.height_at(pose.cx, pose.cy) + 0.5 * pose.height;

    bool clear = true;
    for (const Box7& b : existing) {
      if (bev_overlaps(pose, b)) {
        clear = false;
        break;
      }
    }
    for (std::size_t i = 0; clear && i < accepted_poses.size(); ++i) {
      if (bev_overlaps(pose, accepted_poses[i])) clear = false;
    }
    if (!clear) continue;
    accepted_poses.push_back(pose);
    accepted.push_back(crop);
  }
  if (accepted.empty()) return outcome;

  Scene& out = outcome.scene;
  std::vector<Point> survivors;
  survivors.reserve(out.points.size());
  for (const Point& p : out.points) {
    if (inside_any(p, accepted_poses)) {
      ++outcome.removed_points;
    } else {
      survivors.push_back(p);
    }
  }
  out.points = std::move(survivors);
  for (std::size_t i = 0; i < accepted.size(); ++i) {
    const std::vector<Point> pts = accepted[i]->world_points(accepted_poses[i]);
    out.points.insert(out.points.end(), pts.begin(), pts.end());
    LabeledBox box = accepted[i]->box;
    box.geometry = accepted_poses[i];
    out.boxes.push_back(box);
  }
  outcome.pasted = accepted.size();
  return outcome;
}

Scene pseudo_bbox(const Scene& labeled, const PseudoDatabase& db, const PseudoBBoxParams& params, Rng& rng) {
  if (!bernoulli(rng, params.probability)) return labeled;
  const std::size_t requested = params.num_objects > 0 ? static_cast<std::size_t>(params.num_objects) : 0;
  PasteOutcome outcome = paste_objects(labeled, db, requested, params.score_threshold, params.object_class, rng,
                                         params.position_jitter);
  if (outcome.pasted > 0) outcome.scene.source = SceneSource::fused;
  return std::move(outcome.scene);
}

std::vector<Point> pseudo_background_points(const Scene& donor) {
  std::vector<Box7> foreground;
  for (const LabeledBox& b : donor.boxes) {
    if (b.score > kBackgroundRemovalScore) foreground.push_back(b.geometry);
  }
  std::vector<Point> background;
  background.reserve(donor.points.size());
  for (const Point& p : donor.points) {
    if (!inside_any(p, foreground)) background.push_back(p);
  }
  return background;
}

Scene pseudo_background(const Scene& labeled, const PseudoDatabase& db, const PseudoBackgroundParams& params,
                        Rng& rng) {
  if (!bernoulli(rng, params.probability)) return labeled;
  if (db.frames.empty()) return labeled;

  std::uniform_int_distribution<std::size_t> pick(0, db.frames.size() - 1);
  const Scene& donor = db.frames[pick(rng)];

  const std::vector<Point> donor_background = pseudo_background_points(donor);
  std::vector<Box7> donor_foreground;
  for (const LabeledBox& b : donor.boxes) {
    if (b.score > kBackgroundRemovalScore) donor_foreground.push_back(b.geometry);
  }
  const std::vector<Box7> labeled_boxes = box_geometries(labeled.boxes);
  const GroundPlane target = estimate_ground_plane(labeled_boxes, labeled.points);
  const GroundPlane source = estimate_ground_plane(donor_foreground, donor_background);
  const double dz = target.height_at(0.0, 0.0) - source.height_at(0.0, 0.0);

  Scene out;
  out.frame_id = labeled.frame_id;
  out.boxes = labeled.boxes;
  out.source = SceneSource::fused;
  out.points.reserve(labeled.points.size() + donor_background.size());

  const std::vector<int> owner = assign_points_to_boxes(labeled.points, labeled_boxes);
  for (std::size_t i = 0; i < labeled.points.size(); ++i) {
    if (owner[i] != kNoBox) out.points.push_back(labeled.points[i]);
  }
  for (const Point& p : donor_background) {
    const Point shifted{p.x, p.y, p.z + dz, p.intensity};
    if (!inside_any(shifted, labeled_boxes)) out.points.push_back(shifted);
  }
  return out;
}

void extract_pseudo_assets(const Scene& frame, PseudoDatabaseBuilder& builder) {
  if (frame.source != SceneSource::pseudo) {
    throw Error("frame " + frame.frame_id + " is not pseudo-labeled");
  }
  builder.add_frame(frame);
}

}  // namespace pseudoaug
