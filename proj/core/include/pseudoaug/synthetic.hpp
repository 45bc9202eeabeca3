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

#include <string>

#include "pseudoaug/scene.hpp"

namespace pseudoaug {

// Procedural LiDAR-like scenes for tests, benchmarks and the surrogate
// search: a tilted ground plane, BEV-disjoint objects resting on it, and
// pole-like clutter.

struct SyntheticSceneConfig {
  std::size_t min_objects = 2;
  std::size_t max_objects = 6;
  std::size_t ground_points = 1500;
  std::size_t clutter_points = 150;
  std::size_t points_per_object = 60;
  double extent = 30.0;     // scene spans [-extent, extent] in x and y
  double max_slope = 0.03;  // |alpha|, |beta| of the ground
  double ground_noise = 0.02;
};

/// Labeled scene with ground-truth boxes (score 1).
Scene generate_scene(const SyntheticSceneConfig& cfg, std::string frame_id, Rng& rng);

struct PseudoNoiseConfig {
  double center_sigma = 0.3;
  double dim_sigma = 0.1;
  double heading_sigma = 0.1;
  double miss_rate = 0.1;
  double false_positives = 1.0;  // expected count per frame
};

/// Same points, boxes replaced by jittered detections of the ground truth
/// (scores in [0.3, 1]) plus low-score false positives (scores in
/// [0.05, 0.6]). Source becomes pseudo.
Scene make_noisy_pseudo_labels(const Scene& gt, const PseudoNoiseConfig& cfg, Rng& rng);

/// Points kept, boxes removed.
Scene strip_labels(const Scene& scene);

/// `frames` noisy pseudo-labeled synthetic frames registered through
/// extract_pseudo_assets.
PseudoDatabase make_pseudo_database(std::size_t frames, int generation, const SyntheticSceneConfig& scene_cfg,
                                    const PseudoNoiseConfig& noise_cfg, Rng& rng);

}  // namespace pseudoaug
