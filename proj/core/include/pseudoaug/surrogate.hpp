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
#include <string>
#include <vector>

#include "pseudoaug/pbt.hpp"
#include "pseudoaug/synthetic.hpp"

namespace pseudoaug {

// Desk-scale stand-in for detector training. A hidden optimum lives in the
// normalized schedule space; a schedule's quality is a product of Gaussian
// kernels, one per policy, on its distance to that optimum.

/// Maps every searchable dimension to [0, 1] by its declared range.
std::vector<double> normalize_schedule(const PolicySchedule& schedule);
PolicySchedule denormalize_schedule(std::span<const double> unit, const PolicySchedule& base = {});

struct SurrogateSpec {
  /// Normalized optimum at generation 0, one entry per dimension.
  std::vector<double> optimum;
  /// Per-dimension drift phase.
  std::vector<double> phase;
  /// Sinusoidal drift of the optimum, in normalized units. Integral
  /// dimensions never drift.
  double drift_amplitude = 0.0;
  double drift_period = 20.0;  // generations
  /// Kernel width on the per-policy root-mean-square normalized distance.
  double bandwidth = 0.6;
  /// Half-width of the uniform evaluation noise.
  double noise = 0.0;
  std::uint64_t seed = 0;

  /// Optimum drawn in [0.1, 0.9] per dimension (integral ones on their grid).
  static SurrogateSpec random(std::uint64_t seed, double drift_amplitude = 0.0, double noise = 0.0);

  std::vector<double> optimum_at(int generation) const;
  PolicySchedule optimum_schedule(int generation) const;

  /// Noise-free kernel product in (0, 1].
  double clean_quality(const PolicySchedule& schedule, int generation) const;

  /// clean_quality plus uniform noise in [-noise, noise] keyed on the
  /// schedule values, generation and seed, clamped to [0, 1].
  double quality(const PolicySchedule& schedule, int generation) const;
};

/// Model state of a surrogate trial.
struct SurrogateModel : Model {
  PolicySchedule schedule;
  int generation = 0;
  double quality = 0.0;
  std::size_t frames_augmented = 0;
  std::size_t pseudo_frames_seen = 0;
  std::size_t points_seen = 0;
};

/// Quality is read off the hidden spec. Each call also draws one mixed batch
/// per `augment_batches` and runs the trial's schedule over it, so the data
/// path is exercised.
class SurrogateTrainer : public Trainer {
 public:
  explicit SurrogateTrainer(SurrogateSpec spec, std::size_t augment_batches = 1)
      : spec_(std::move(spec)), augment_batches_(augment_batches) {}

  ModelHandle train(const TrialState& trial, const TrainingContext& ctx) const override;

  const SurrogateSpec& spec() const { return spec_; }

 private:
  SurrogateSpec spec_;
  std::size_t augment_batches_;
};

class SurrogateEvaluator : public Evaluator {
 public:
  double evaluate(const TrialState& trial, const ModelHandle& model, int generation) const override;
};

/// Emits detections of hidden ground truth whose recall, localization and
/// scores improve with model quality, plus low-score false positives.
/// Deterministic per (model schedule, generation, frame).
class SurrogateDetector : public Detector {
 public:
  explicit SurrogateDetector(std::map<std::string, std::vector<LabeledBox>> hidden_gt)
      : hidden_gt_(std::move(hidden_gt)) {}

  std::vector<LabeledBox> detect(const ModelHandle& model, int trial_id, const Scene& frame) const override;

 private:
  std::map<std::string, std::vector<LabeledBox>> hidden_gt_;
};

struct SurrogateWorld {
  std::vector<Scene> labeled;
  std::vector<Scene> unlabeled;  // boxes stripped
  std::map<std::string, std::vector<LabeledBox>> hidden_gt;
};

SurrogateWorld make_surrogate_world(std::size_t labeled, std::size_t unlabeled, std::uint64_t seed,
                                    const SyntheticSceneConfig& scene_cfg = {});

}  // namespace pseudoaug
