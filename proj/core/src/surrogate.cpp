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

#include "pseudoaug/surrogate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "pseudoaug/error.hpp"

namespace pseudoaug {

namespace {

std::uint64_t schedule_hash(const PolicySchedule& schedule) {
  std::uint64_t h = 0x51ed270b27a1f3c5ULL;
  for (double v : encode_schedule(schedule)) h = mix_seed(h, std::bit_cast<std::uint64_t>(v));
  return h;
}

double unit_from_hash(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

}  // namespace

std::vector<double> normalize_schedule(const PolicySchedule& schedule) {
  std::vector<double> v = encode_schedule(schedule);
  const auto dims = schedule_dimensions();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = (v[i] - dims[i].min) / (dims[i].max - dims[i].min);
  return v;
}

PolicySchedule denormalize_schedule(std::span<const double> unit, const PolicySchedule& base) {
  const auto dims = schedule_dimensions();
  if (unit.size() != dims.size()) throw DimensionMismatch(dims.size(), unit.size());
  std::vector<double> v(unit.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = dims[i].min + unit[i] * (dims[i].max - dims[i].min);
  return decode_schedule(v, base).schedule;
}

SurrogateSpec SurrogateSpec::random(std::uint64_t seed, double drift_amplitude, double noise) {
  SurrogateSpec spec;
  spec.seed = seed;
  spec.drift_amplitude = drift_amplitude;
  spec.noise = noise;
  Rng rng(mix_seed(seed, 0x5e0a11ULL));
  const auto dims = schedule_dimensions();
  for (const ParameterDimension& d : dims) {
    double u = uniform(rng, 0.1, 0.9);
    if (d.integral) {
      const double span = d.max - d.min;
      u = std::round(u * span) / span;
    }
    spec.optimum.push_back(u);
    spec.phase.push_back(uniform(rng, 0.0, 2.0 * std::numbers::pi));
  }
  return spec;
}

std::vector<double> SurrogateSpec::optimum_at(int generation) const {
  std::vector<double> out = optimum;
  if (drift_amplitude == 0.0) return out;
  const auto dims = schedule_dimensions();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (dims[i].integral) continue;
    const double angle = 2.0 * std::numbers::pi * generation / drift_period + phase[i];
    out[i] = std::clamp(out[i] + drift_amplitude * std::sin(angle), 0.0, 1.0);
  }
  return out;
}

PolicySchedule SurrogateSpec::optimum_schedule(int generation) const {
  return denormalize_schedule(optimum_at(generation));
}

double SurrogateSpec::clean_quality(const PolicySchedule& schedule, int generation) const {
  const std::vector<double> x = normalize_schedule(schedule);
  const std::vector<double> target = optimum_at(generation);
  if (target.size() != x.size()) throw DimensionMismatch(x.size(), target.size());
  double exponent = 0.0;
  for (PolicyId id : kPolicyOrder) {
    const auto [first, last] = policy_dimension_range(id);
    double sq = 0.0;
    for (std::size_t i = first; i < last; ++i) sq += (x[i] - target[i]) * (x[i] - target[i]);
    exponent += sq / static_cast<double>(last - first);
  }
  return std::exp(-exponent / (2.0 * bandwidth * bandwidth));
}

double SurrogateSpec::quality(const PolicySchedule& schedule, int generation) const {
  double q = clean_quality(schedule, generation);
  if (noise > 0.0) {
    const std::uint64_t key = mix_seed(mix_seed(schedule_hash(schedule), static_cast<std::uint64_t>(generation)), seed);
    q += noise * (2.0 * unit_from_hash(key) - 1.0);
  }
  return std::clamp(q, 0.0, 1.0);
}

ModelHandle SurrogateTrainer::train(const TrialState& trial, const TrainingContext& ctx) const {
  auto model = std::make_shared<SurrogateModel>();
  model->schedule = trial.schedule;
  model->generation = ctx.generation;
  model->quality = spec_.quality(trial.schedule, ctx.generation);

  const std::size_t pseudo_size = ctx.db ? ctx.db->frames.size() : 0;
  if (augment_batches_ > 0 && (!ctx.labeled.empty() || pseudo_size > 0)) {
    static const PseudoDatabase kEmpty;
    const PseudoDatabase& db = ctx.db ? *ctx.db : kEmpty;
    Rng rng(ctx.seed);
    const std::vector<Batch> batches = mix_batches(ctx.labeled.size(), pseudo_size, ctx.mix, augment_batches_, rng);
    std::uint64_t k = 0;
    for (const Batch& batch : batches) {
      for (const BatchItem& item : batch) {
        const Scene& source = item.source == StreamSource::labeled ? ctx.labeled[item.index] : db.frames[item.index];
        const Scene augmented = apply_schedule(source, db, trial.schedule, mix_seed(ctx.seed, ++k));
        model->points_seen += augmented.points.size();
        ++model->frames_augmented;
        if (item.source == StreamSource::pseudo) ++model->pseudo_frames_seen;
      }
    }
  }
  return model;
}

double SurrogateEvaluator::evaluate(const TrialState& trial, const ModelHandle& model, int) const {
  const auto* m = dynamic_cast<const SurrogateModel*>(model.get());
  if (m == nullptr) throw Error("trial " + std::to_string(trial.trial_id) + " has no surrogate model");
  return m->quality;
}

std::vector<LabeledBox> SurrogateDetector::detect(const ModelHandle& model, int trial_id, const Scene& frame) const {
  const auto* m = dynamic_cast<const SurrogateModel*>(model.get());
  if (m == nullptr) throw DetectorFailure(trial_id, "not a surrogate model");
  const auto it = hidden_gt_.find(frame.frame_id);
  if (it == hidden_gt_.end()) throw DetectorFailure(trial_id, "unknown frame " + frame.frame_id);

  const double q = m->quality;
  Rng rng(mix_seed(mix_seed(schedule_hash(m->schedule), static_cast<std::uint64_t>(m->generation)),
                   hash_string(frame.frame_id)));
  std::vector<LabeledBox> out;
  double extent = 1.0;
  for (const LabeledBox& gt : it->second) {
    extent = std::max({extent, std::abs(gt.geometry.cx), std::abs(gt.geometry.cy)});
    if (!bernoulli(rng, 0.3 + 0.7 * q)) continue;
    LabeledBox det = gt;
    const double sigma = 0.6 * (1.0 - q);
    det.geometry.cx += sigma * standard_normal(rng);
    det.geometry.cy += sigma * standard_normal(rng);
    det.geometry.heading = normalize_heading(det.geometry.heading + 0.3 * sigma * standard_normal(rng));
    det.score = std::clamp(0.4 + 0.6 * q - 0.1 * std::abs(standard_normal(rng)), 0.05, 1.0);
    det.source = BoxSource::pseudo;
    out.push_back(det);
  }
  const int fps = std::uniform_int_distribution<int>(0, static_cast<int>(std::lround(3.0 * (1.0 - q))))(rng);
  for (int i = 0; i < fps; ++i) {
    LabeledBox fp;
    fp.geometry.cx = uniform(rng, -extent, extent);
    fp.geometry.cy = uniform(rng, -extent, extent);
    fp.geometry.cz = -1.0;
    fp.geometry.length = 4.0;
    fp.geometry.width = 1.8;
    fp.geometry.height = 1.5;
    fp.geometry.heading = uniform(rng, -std::numbers::pi, std::numbers::pi);
    fp.object_class = ObjectClass::vehicle;
    fp.score = uniform(rng, 0.05, 0.45);
    fp.source = BoxSource::pseudo;
    out.push_back(fp);
  }
  return out;
}

SurrogateWorld make_surrogate_world(std::size_t labeled, std::size_t unlabeled, std::uint64_t seed,
                                    const SyntheticSceneConfig& scene_cfg) {
  SurrogateWorld world;
  Rng rng(mix_seed(seed, 0x3017dULL));
  char id[32];
  for (std::size_t i = 0; i < labeled; ++i) {
    std::snprintf(id, sizeof id, "L%06zu", i);
    world.labeled.push_back(generate_scene(scene_cfg, id, rng));
  }
  for (std::size_t i = 0; i < unlabeled; ++i) {
    std::snprintf(id, sizeof id, "U%06zu", i);
    const Scene gt = generate_scene(scene_cfg, id, rng);
    world.hidden_gt[gt.frame_id] = gt.boxes;
    world.unlabeled.push_back(strip_labels(gt));
  }
  return world;
}

}  // namespace pseudoaug
