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

#include <numbers>

#include "pseudoaug/random.hpp"
#include "pseudoaug/scene.hpp"

namespace pseudoaug {

// Geometric augmentations applied after the pseudo-label policies. Every
// policy first draws once to decide whether it fires, then draws its own
// parameters.

struct RandomRotationParams {
  double probability = 0.0;
  double max_angle = std::numbers::pi / 4;  // radians

  friend bool operator==(const RandomRotationParams&, const RandomRotationParams&) = default;
};

struct FlipYParams {
  double probability = 0.0;

  friend bool operator==(const FlipYParams&, const FlipYParams&) = default;
};

struct WorldScalingParams {
  double probability = 0.0;
  double min_scale = 0.95;
  double max_scale = 1.05;

  friend bool operator==(const WorldScalingParams&, const WorldScalingParams&) = default;
};

struct GlobalTranslateNoiseParams {
  double probability = 0.0;
  double sigma_x = 0.2;  // meters
  double sigma_y = 0.2;
  double sigma_z = 0.05;

  friend bool operator==(const GlobalTranslateNoiseParams&, const GlobalTranslateNoiseParams&) = default;
};

struct FrustumDropoutParams {
  double probability = 0.0;
  double theta_width = 0.4;  // azimuth window, radians
  double phi_width = 0.4;    // elevation window, radians
  double drop_fraction = 0.5;

  friend bool operator==(const FrustumDropoutParams&, const FrustumDropoutParams&) = default;
};

struct FrustumNoiseParams {
  double probability = 0.0;
  double theta_width = 0.4;
  double phi_width = 0.4;
  double range_sigma = 0.1;  // meters along the ray

  friend bool operator==(const FrustumNoiseParams&, const FrustumNoiseParams&) = default;
};

struct RandomDropLaserPointsParams {
  double probability = 0.0;
  double keep_prob = 0.9;  // (0, 1]

  friend bool operator==(const RandomDropLaserPointsParams&, const RandomDropLaserPointsParams&) = default;
};

struct GTBBoxPasteParams {
  double probability = 0.0;
  int num_objects = 0;

  friend bool operator==(const GTBBoxPasteParams&, const GTBBoxPasteParams&) = default;
};

/// Angular window in sensor-centric spherical coordinates. Azimuth is
/// atan2(y, x); elevation is atan2(z, hypot(x, y)) in [-pi/2, pi/2].
struct FrustumWindow {
  double theta_center = 0.0;
  double theta_width = 0.0;
  double phi_low = 0.0;
  double phi_high = 0.0;

  bool contains(const Point& p) const;
};

/// Window of the given widths anchored at the direction of a uniformly drawn
/// point. The elevation interval is slid, not truncated, to stay inside
/// [-pi/2, pi/2], so a width of pi covers every elevation. Requires a
/// non-empty cloud.
FrustumWindow draw_frustum_window(std::span<const Point> points, double theta_width, double phi_width, Rng& rng);

Scene random_rotation_z(const Scene& scene, const RandomRotationParams& params, Rng& rng);
Scene random_flip_y(const Scene& scene, const FlipYParams& params, Rng& rng);
Scene world_scaling(const Scene& scene, const WorldScalingParams& params, Rng& rng);
Scene global_translate_noise(const Scene& scene, const GlobalTranslateNoiseParams& params, Rng& rng);

/// Deletes each in-window point with probability drop_fraction.
Scene frustum_dropout(const Scene& scene, const FrustumDropoutParams& params, Rng& rng);

/// Moves each in-window point along its ray by Gaussian(0, range_sigma).
/// Ranges never drop below 1e-3 of the original so the direction is kept.
Scene frustum_noise(const Scene& scene, const FrustumNoiseParams& params, Rng& rng);

/// Keeps each point independently with probability keep_prob, preserving
/// order.
Scene random_drop_points(const Scene& scene, const RandomDropLaserPointsParams& params, Rng& rng);

/// Ground-truth object pasting: the PseudoBBox mechanics applied to a
/// database built from labeled frames.
Scene gt_bbox_paste(const Scene& scene, const PseudoDatabase& labeled_db, const GTBBoxPasteParams& params, Rng& rng);

}  // namespace pseudoaug
