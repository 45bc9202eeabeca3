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

#include "pseudoaug/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pseudoaug/policies_pseudo.hpp"

namespace pseudoaug {

namespace {

constexpr int kPlacementAttempts = 50;

struct ClassShape {
  ObjectClass cls;
  double length, width, height;
};

ClassShape draw_shape(Rng& rng) {
  const double u = uniform(rng, 0.0, 1.0);
  const double s = uniform(rng, 0.9, 1.1);
  if (u < 0.6) return {ObjectClass::vehicle, 4.2 * s, 1.8 * s, 1.6 * s};
  if (u < 0.85) return {ObjectClass::pedestrian, 0.8 * s, 0.7 * s, 1.75 * s};
  return {ObjectClass::cyclist, 1.8 * s, 0.6 * s, 1.7 * s};
}

bool inside_any(const Point& p, const std::vector<LabeledBox>& boxes) {
  for (const LabeledBox& b : boxes) {
    if (point_in_box(p, b.geometry)) return true;
  }
  return false;
}

}  // namespace

Scene generate_scene(const SyntheticSceneConfig& cfg, std::string frame_id, Rng& rng) {
  Scene scene;
  scene.frame_id = std::move(frame_id);
  scene.source = SceneSource::labeled;

  GroundPlane ground;
  ground.alpha = uniform(rng, -cfg.max_slope, cfg.max_slope);
  ground.beta = uniform(rng, -cfg.max_slope, cfg.max_slope);
  ground.gamma = uniform(rng, -1.9, -1.5);

  const std::size_t target = std::uniform_int_distribution<std::size_t>(cfg.min_objects, cfg.max_objects)(rng);
  const double reach = 0.85 * cfg.extent;
  for (std::size_t n = 0; n < target; ++n) {
    for (int attempt = 0; attempt < kPlacementAttempts; ++attempt) {
      const ClassShape shape = draw_shape(rng);
      Box7 box;
      box.cx = uniform(rng, -reach, reach);
      box.cy = uniform(rng, -reach, reach);
      box.length = shape.length;
      box.width = shape.width;
      box.height = shape.height;
      box.heading = uniform(rng, -std::numbers::pi, std::numbers::pi);
      box.cz = ground.height_at(box.cx, box.cy) + 0.5 * box.height;
      bool clear = true;
      for (const LabeledBox& other : scene.boxes) {
        if (bev_overlaps(box, other.geometry)) {
          clear = false;
          break;
        }
      }
      if (!clear) continue;
      scene.boxes.push_back({box, shape.cls, 1.0, BoxSource::ground_truth});
      break;
    }
  }

  for (const LabeledBox& b : scene.boxes) {
    for (std::size_t i = 0; i < cfg.points_per_object; ++i) {
      const Point local{uniform(rng, -0.47, 0.47) * b.geometry.length, uniform(rng, -0.47, 0.47) * b.geometry.width,
                        uniform(rng, -0.47, 0.47) * b.geometry.height, uniform(rng, 0.2, 1.0)};
      scene.points.push_back(from_box_frame(local, b.geometry));
    }
  }
  for (std::size_t i = 0; i < cfg.ground_points; ++i) {
    const double x = uniform(rng, -cfg.extent, cfg.extent);
    const double y = uniform(rng, -cfg.extent, cfg.extent);
    const double z = ground.height_at(x, y) + cfg.ground_noise * standard_normal(rng);
    scene.points.push_back({x, y, z, uniform(rng, 0.0, 0.3)});
  }
  for (std::size_t i = 0; i < cfg.clutter_points; ++i) {
    for (int attempt = 0; attempt < kPlacementAttempts; ++attempt) {
      const double x = uniform(rng, -cfg.extent, cfg.extent);
      const double y = uniform(rng, -cfg.extent, cfg.extent);
      const Point p{x, y, ground.height_at(x, y) + uniform(rng, 0.2, 3.0), uniform(rng, 0.0, 1.0)};
      if (inside_any(p, scene.boxes)) continue;
      scene.points.push_back(p);
      break;
    }
  }
  return scene;
}

Scene make_noisy_pseudo_labels(const Scene& gt, const PseudoNoiseConfig& cfg, Rng& rng) {
  Scene out;
  out.frame_id = gt.frame_id;
  out.points = gt.points;
  out.source = SceneSource::pseudo;
  for (const LabeledBox& b : gt.boxes) {
    if (bernoulli(rng, cfg.miss_rate)) continue;
    LabeledBox det = b;
    det.geometry.cx += cfg.center_sigma * standard_normal(rng);
    det.geometry.cy += cfg.center_sigma * standard_normal(rng);
    det.geometry.cz += 0.3 * cfg.center_sigma * standard_normal(rng);
    det.geometry.length = std::max(0.2, det.geometry.length * (1.0 + cfg.dim_sigma * standard_normal(rng)));
    det.geometry.width = std::max(0.2, det.geometry.width * (1.0 + cfg.dim_sigma * standard_normal(rng)));
    det.geometry.height = std::max(0.2, det.geometry.height * (1.0 + cfg.dim_sigma * standard_normal(rng)));
    det.geometry.heading = normalize_heading(det.geometry.heading + cfg.heading_sigma * standard_normal(rng));
    det.score = uniform(rng, 0.3, 1.0);
    det.source = BoxSource::pseudo;
    out.boxes.push_back(det);
  }

  double extent = 1.0;
  for (const Point& p : gt.points) extent = std::max({extent, std::abs(p.x), std::abs(p.y)});
  std::poisson_distribution<int> fp_count(std::max(cfg.false_positives, 1e-9));
  const int fps = cfg.false_positives > 0.0 ? fp_count(rng) : 0;
  for (int i = 0; i < fps; ++i) {
    const ClassShape shape = draw_shape(rng);
    LabeledBox fp;
    fp.geometry.cx = uniform(rng, -extent, extent);
    fp.geometry.cy = uniform(rng, -extent, extent);
    fp.geometry.length = shape.length;
    fp.geometry.width = shape.width;
    fp.geometry.height = shape.height;
    fp.geometry.heading = uniform(rng, -std::numbers::pi, std::numbers::pi);
    fp.geometry.cz = uniform(rng, -1.0, 0.0);
    fp.object_class = shape.cls;
    fp.score = uniform(rng, 0.05, 0.6);
    fp.source = BoxSource::pseudo;
    out.boxes.push_back(fp);
  }
  return out;
}

Scene strip_labels(const Scene& scene) {
  Scene out = scene;
  out.boxes.clear();
  return out;
}

PseudoDatabase make_pseudo_database(std::size_t frames, int generation, const SyntheticSceneConfig& scene_cfg,
                                    const PseudoNoiseConfig& noise_cfg, Rng& rng) {
  PseudoDatabaseBuilder builder(generation);
  for (std::size_t i = 0; i < frames; ++i) {
    const Scene gt = generate_scene(scene_cfg, "db" + std::to_string(i), rng);
    extract_pseudo_assets(make_noisy_pseudo_labels(gt, noise_cfg, rng), builder);
  }
  return std::move(builder).build();
}

}  // namespace pseudoaug
