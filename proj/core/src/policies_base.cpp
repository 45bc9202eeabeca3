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

#include "pseudoaug/policies_base.hpp"

#include <algorithm>
#include <cmath>

#include "pseudoaug/policies_pseudo.hpp"

namespace pseudoaug {

namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;

double azimuth(const Point& p) { return std::atan2(p.y, p.x); }
double elevation(const Point& p) { return std::atan2(p.z, std::hypot(p.x, p.y)); }

}  // namespace

bool FrustumWindow::contains(const Point& p) const {
  const double dtheta = std::abs(normalize_heading(azimuth(p) - theta_center));
  if (dtheta > 0.5 * theta_width) return false;
  const double phi = elevation(p);
  return phi >= phi_low && phi <= phi_high;
}

FrustumWindow draw_frustum_window(std::span<const Point> points, double theta_width, double phi_width, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);
  const Point& anchor = points[pick(rng)];
  const double phi0 = elevation(anchor);
  const double width = std::min(phi_width, std::numbers::pi);

  FrustumWindow window;
  window.theta_center = azimuth(anchor);
  window.theta_width = theta_width;
  window.phi_low = std::clamp(phi0 - 0.5 * width, -kHalfPi, kHalfPi - width);
  window.phi_high = window.phi_low + width;
  return window;
}

Scene random_rotation_z(const Scene& scene, const RandomRotationParams& params, Rng& rng) {
  if (!bernoulli(rng, params.probability)) return scene;
  const double angle = uniform(rng, -params.max_angle, params.max_angle);
  return transform_scene(scene, RotateZ{angle});
}

Scene random_flip_y(const Scene& scene, const FlipYParams& params, Rng& rng) {
  if (!bernoulli(rng, params.probability)) return scene;
  return transform_scene(scene, FlipY{});
}

Scene world_scaling(const Scene& scene, const WorldScalingParams& params, Rng& rng) {
  if (!bernoulli(rng, params.probability)) return scene;
  const double factor = uniform(rng, params.min_scale, params.max_scale);
  return transform_scene(scene, Scale{factor});
}

Scene global_translate_noise(const Scene& scene, const GlobalTranslateNoiseParams& params, Rng& rng) {
  if (!bernoulli(rng, params.probability)) return scene;
  const double dx = params.sigma_x * standard_normal(rng);
  const double dy = params.sigma_y * standard_normal(rng);
  const double dz = params.sigma_z * standard_normal(rng);
  return transform_scene(scene, Translate{dx, dy, dz});
}

Scene frustum_dropout(const Scene& scene, const FrustumDropoutParams& params, Rng& rng) {
  if (!bernoulli(rng, params.probability) || scene.points.empty()) return scene;
  const FrustumWindow window = draw_frustum_window(scene.points, params.theta_width, params.phi_width, rng);

  Scene out;
  out.frame_id = scene.frame_id;
  out.boxes = scene.boxes;
  out.source = scene.source;
  out.points.reserve(scene.points.size());
  for (const Point& p : scene.points) {
    if (window.contains(p) && bernoulli(rng, params.drop_fraction)) continue;
    out.points.push_back(p);
  }
  return out;
}

Scene frustum_noise(const Scene& scene, const FrustumNoiseParams& params, Rng& rng) {
  if (!bernoulli(rng, params.probability) || scene.points.empty()) return scene;
  const FrustumWindow window = draw_frustum_window(scene.points, params.theta_width, params.phi_width, rng);

  Scene out = scene;
  for (Point& p : out.points) {
    if (!window.contains(p)) continue;
    const double range = std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
    const double noise = params.range_sigma * standard_normal(rng);
    if (range == 0.0 || noise == 0.0) continue;
    const double scale = std::max(range + noise, 1e-3 * range) / range;
    p.x *= scale;
    p.y *= scale;
    p.z *= scale;
  }
  return out;
}

Scene random_drop_points(const Scene& scene, const RandomDropLaserPointsParams& params, Rng& rng) {
  if (!bernoulli(rng, params.probability)) return scene;
  Scene out;
  out.frame_id = scene.frame_id;
  out.boxes = scene.boxes;
  out.source = scene.source;
  out.points.reserve(scene.points.size());
  for (const Point& p : scene.points) {
    if (bernoulli(rng, params.keep_prob)) out.points.push_back(p);
  }
  return out;
}

Scene gt_bbox_paste(const Scene& scene, const PseudoDatabase& labeled_db, const GTBBoxPasteParams& params,
                    Rng& rng) {
  if (!bernoulli(rng, params.probability)) return scene;
  const std::size_t requested = params.num_objects > 0 ? static_cast<std::size_t>(params.num_objects) : 0;
  // Labeled crops carry score 1.0, so any threshold <= 1 admits them all.
  return paste_objects(scene, labeled_db, requested, 0.0, std::nullopt, rng).scene;
}

}  // namespace pseudoaug
