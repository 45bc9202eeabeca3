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
#include <optional>

#include "pseudoaug/random.hpp"
#include "pseudoaug/scene.hpp"

namespace pseudoaug {

/// Clean a pseudo-labeled frame: drop low-confidence boxes together with the
/// points that only they explain.
struct PseudoFrameParams {
  double probability = 0.0;      // [0, 1]
  double score_threshold = 0.5;  // [0.5, 1]

  friend bool operator==(const PseudoFrameParams&, const PseudoFrameParams&) = default;
};

/// Paste high-confidence pseudo objects into a labeled frame.
struct PseudoBBoxParams {
  double probability = 0.0;      // [0, 1]
  int num_objects = 0;           // [0, 20]
  double score_threshold = 0.5;  // [0.5, 1]
  /// Restricts candidates to one class; nullopt draws from every class.
  std::optional<ObjectClass> object_class;
  /// Extension, not searched: standard deviation in meters of a Gaussian
  /// (x, y) offset applied to each candidate before the overlap test. 0 keeps
  /// donor positions.
  double position_jitter = 0.0;

  friend bool operator==(const PseudoBBoxParams&, const PseudoBBoxParams&) = default;
};

/// Replace a labeled frame's background with a pseudo-labeled frame's.
struct PseudoBackgroundParams {
  double probability = 0.0;  // [0, 1]

  friend bool operator==(const PseudoBackgroundParams&, const PseudoBackgroundParams&) = default;
};

/// Donor points inside pseudo boxes scoring strictly above this are treated
/// as foreground and never reach the swapped-in background.
inline constexpr double kBackgroundRemovalScore = 0.1;

/// Upper bound accepted for PseudoBBoxParams::position_jitter, meters.
inline constexpr double kMaxPositionJitter = 10.0;
/// Candidates drawn per requested pasted object.
inline constexpr std::size_t kPasteOversampling = 10;

/// With probability `params.probability`, removes every box scoring below the
/// threshold and every point inside a removed box that is inside no kept
/// box. Otherwise returns `frame` unchanged.
Scene pseudo_frame(const Scene& frame, const PseudoFrameParams& params, Rng& rng);

struct PasteOutcome {
  Scene scene;
  std::size_t pasted = 0;
  std::size_t removed_points = 0;
  GroundPlane plane;
};

/// Shared paste kernel for PseudoBBox and ground-truth box pasting.
///
/// Estimates the target ground plane from `scene`, draws
/// kPasteOversampling * num_objects candidates with score >= min_score,
/// greedily accepts those whose BEV footprint overlaps no existing box and no
/// earlier acceptance, seats each accepted crop on the plane at its donor
/// (x, y, heading), removes scene points inside the pasted boxes and appends
/// the crop points and boxes. A positive `position_jitter` offsets each
/// candidate's (x, y) first.
PasteOutcome paste_objects(const Scene& scene, const PseudoDatabase& db, std::size_t num_objects, double min_score,
                           std::optional<ObjectClass> object_class, Rng& rng, double position_jitter = 0.0);

/// PseudoBBox: paste_objects from the pseudo database; marks the result fused
/// when at least one object was pasted.
Scene pseudo_bbox(const Scene& labeled, const PseudoDatabase& db, const PseudoBBoxParams& params, Rng& rng);

/// PseudoBackground: keep the labeled foreground (points inside labeled
/// boxes, bit-exact, plus the boxes) and replace everything else with the
/// background of a uniformly drawn pseudo frame, shifted in z so the two
/// ground planes agree at the origin. Donor points that land inside a labeled
/// box are dropped.
Scene pseudo_background(const Scene& labeled, const PseudoDatabase& db, const PseudoBackgroundParams& params,
                        Rng& rng);

/// Donor points outside every donor box scoring above
/// kBackgroundRemovalScore.
std::vector<Point> pseudo_background_points(const Scene& donor);

/// Registers a pseudo-labeled frame and its per-class crops in the
/// generation under construction. Throws Error unless the frame has pseudo
/// provenance.
void extract_pseudo_assets(const Scene& frame, PseudoDatabaseBuilder& builder);

}  // namespace pseudoaug
