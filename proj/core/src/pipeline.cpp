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

#include "pseudoaug/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "pseudoaug/error.hpp"

namespace pseudoaug {

namespace {

constexpr double kPi = std::numbers::pi;

struct DimensionAccess {
  ParameterDimension dim;
  double (*get)(const PolicySchedule&);
  void (*set)(PolicySchedule&, double);
};

#define PSEUDOAUG_DIM(POLICY, FIELD, MEMBER, LO, HI, INTEGRAL)                         \
  DimensionAccess {                                                                    \
    ParameterDimension{PolicyId::POLICY, #MEMBER, LO, HI, INTEGRAL},                   \
        [](const PolicySchedule& s) { return static_cast<double>(s.FIELD.MEMBER); },   \
        [](PolicySchedule& s, double v) {                                              \
          s.FIELD.MEMBER = static_cast<decltype(s.FIELD.MEMBER)>(v);                   \
        }                                                                              \
  }

const std::array<DimensionAccess, 25> kDimensions{{
    PSEUDOAUG_DIM(pseudo_frame, pseudo_frame, probability, 0.0, 1.0, false),
    PSEUDOAUG_DIM(pseudo_frame, pseudo_frame, score_threshold, 0.5, 1.0, false),
    PSEUDOAUG_DIM(pseudo_bbox, pseudo_bbox, probability, 0.0, 1.0, false),
    PSEUDOAUG_DIM(pseudo_bbox, pseudo_bbox, num_objects, 0.0, 20.0, true),
    PSEUDOAUG_DIM(pseudo_bbox, pseudo_bbox, score_threshold, 0.5, 1.0, false),
    PSEUDOAUG_DIM(pseudo_background, pseudo_background, probability, 0.0, 1.0, false),
    PSEUDOAUG_DIM(random_rotation, random_rotation, probability, 0.0, 1.0, false),
    PSEUDOAUG_DIM(random_rotation, random_rotation, max_angle, 0.0, kPi, false),
    PSEUDOAUG_DIM(world_scaling, world_scaling, probability, 0.0, 1.0, false),
    PSEUDOAUG_DIM(world_scaling, world_scaling, min_scale, 0.8, 1.0, false),
    PSEUDOAUG_DIM(world_scaling, world_scaling, max_scale, 1.0, 1.2, false),
    PSEUDOAUG_DIM(global_translate_noise, global_translate_noise, probability, 0.0, 1.0, false),
    PSEUDOAUG_DIM(global_translate_noise, global_translate_noise, sigma_x, 0.0, 0.5, false),
    PSEUDOAUG_DIM(global_translate_noise, global_translate_noise, sigma_y, 0.0, 0.5, false),
    PSEUDOAUG_DIM(global_translate_noise, global_translate_noise, sigma_z, 0.0, 0.2, false),
    PSEUDOAUG_DIM(frustum_dropout, frustum_dropout, probability, 0.0, 1.0, false),
    PSEUDOAUG_DIM(frustum_dropout, frustum_dropout, theta_width, 0.0, kPi, false),
    PSEUDOAUG_DIM(frustum_dropout, frustum_dropout, phi_width, 0.0, kPi / 2, false),
    PSEUDOAUG_DIM(frustum_dropout, frustum_dropout, drop_fraction, 0.0, 1.0, false),
    PSEUDOAUG_DIM(frustum_noise, frustum_noise, probability, 0.0, 1.0, false),
    PSEUDOAUG_DIM(frustum_noise, frustum_noise, theta_width, 0.0, kPi, false),
    PSEUDOAUG_DIM(frustum_noise, frustum_noise, phi_width, 0.0, kPi / 2, false),
    PSEUDOAUG_DIM(frustum_noise, frustum_noise, range_sigma, 0.0, 0.5, false),
    PSEUDOAUG_DIM(random_drop_laser_points, random_drop_laser_points, probability, 0.0, 1.0, false),
    PSEUDOAUG_DIM(random_drop_laser_points, random_drop_laser_points, keep_prob, 0.5, 1.0, false),
}};

#undef PSEUDOAUG_DIM

const std::array<ParameterDimension, kDimensions.size()> kPublicDimensions = [] {
  std::array<ParameterDimension, kDimensions.size()> out{};
  for (std::size_t i = 0; i < kDimensions.size(); ++i) out[i] = kDimensions[i].dim;
  return out;
}();

std::string qualified_name(const ParameterDimension& d) {
  return std::string(policy_name(d.policy)) + "." + std::string(d.name);
}

}  // namespace

std::string_view policy_name(PolicyId id) {
  switch (id) {
    case PolicyId::pseudo_frame: return "PseudoFrame";
    case PolicyId::pseudo_bbox: return "PseudoBBox";
    case PolicyId::pseudo_background: return "PseudoBackground";
    case PolicyId::random_rotation: return "RandomRotation";
    case PolicyId::world_scaling: return "WorldScaling";
    case PolicyId::global_translate_noise: return "GlobalTranslateNoise";
    case PolicyId::frustum_dropout: return "FrustumDropout";
    case PolicyId::frustum_noise: return "FrustumNoise";
    case PolicyId::random_drop_laser_points: return "RandomDropLaserPoints";
  }
  return "";
}

std::optional<PolicyId> parse_policy_name(std::string_view name) {
  for (PolicyId id : kPolicyOrder) {
    if (policy_name(id) == name) return id;
  }
  return std::nullopt;
}

std::span<const ParameterDimension> schedule_dimensions() { return kPublicDimensions; }

std::pair<std::size_t, std::size_t> policy_dimension_range(PolicyId policy) {
  std::size_t first = kDimensions.size();
  std::size_t last = 0;
  for (std::size_t i = 0; i < kDimensions.size(); ++i) {
    if (kDimensions[i].dim.policy == policy) {
      first = std::min(first, i);
      last = i + 1;
    }
  }
  return {first, last};
}

std::vector<double> encode_schedule(const PolicySchedule& schedule) {
  std::vector<double> out;
  out.reserve(kDimensions.size());
  for (const DimensionAccess& d : kDimensions) out.push_back(d.get(schedule));
  return out;
}

DecodedSchedule decode_schedule(std::span<const double> vector, const PolicySchedule& base) {
  if (vector.size() != kDimensions.size()) throw DimensionMismatch(kDimensions.size(), vector.size());
  DecodedSchedule out{base, {}};
  for (std::size_t i = 0; i < kDimensions.size(); ++i) {
    const ParameterDimension& dim = kDimensions[i].dim;
    double v = vector[i];
    double clamped = std::isnan(v) ? dim.min : std::clamp(v, dim.min, dim.max);
    if (dim.integral) clamped = std::round(clamped);
    if (!(clamped == v) && !(dim.integral && std::round(std::clamp(v, dim.min, dim.max)) == clamped &&
                             v >= dim.min && v <= dim.max)) {
      std::ostringstream note;
      note << qualified_name(dim) << ": " << v << " -> " << clamped;
      out.clamped.push_back(note.str());
    }
    kDimensions[i].set(out.schedule, clamped);
  }
  return out;
}

void validate_schedule(const PolicySchedule& schedule) {
  for (const DimensionAccess& d : kDimensions) {
    const double v = d.get(schedule);
    if (!(v >= d.dim.min && v <= d.dim.max)) {
      std::ostringstream msg;
      msg << "value " << v << " outside [" << d.dim.min << ", " << d.dim.max << "]";
      throw ConfigError(qualified_name(d.dim), msg.str());
    }
  }
  if (schedule.world_scaling.min_scale > schedule.world_scaling.max_scale) {
    throw ConfigError("WorldScaling.min_scale", "exceeds max_scale");
  }
  const double jitter = schedule.pseudo_bbox.position_jitter;
  if (!(jitter >= 0.0 && jitter <= kMaxPositionJitter)) {
    throw ConfigError("PseudoBBox.position_jitter", "outside [0, 10]");
  }
}

nlohmann::ordered_json schedule_to_json(const PolicySchedule& schedule) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (PolicyId id : kPolicyOrder) {
    nlohmann::ordered_json bundle = nlohmann::ordered_json::object();
    const auto [first, last] = policy_dimension_range(id);
    for (std::size_t i = first; i < last; ++i) {
      const double v = kDimensions[i].get(schedule);
      if (kDimensions[i].dim.integral) {
        bundle[std::string(kDimensions[i].dim.name)] = static_cast<long long>(v);
      } else {
        bundle[std::string(kDimensions[i].dim.name)] = v;
      }
    }
    if (id == PolicyId::pseudo_bbox && schedule.pseudo_bbox.object_class) {
      bundle["object_class"] = std::string(to_string(*schedule.pseudo_bbox.object_class));
    }
    if (id == PolicyId::pseudo_bbox && schedule.pseudo_bbox.position_jitter > 0.0) {
      bundle["position_jitter"] = schedule.pseudo_bbox.position_jitter;
    }
    doc[std::string(policy_name(id))] = std::move(bundle);
  }
  return doc;
}

PolicySchedule schedule_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("schedule", "expected a JSON object");
  PolicySchedule schedule;
  for (const auto& [key, bundle] : doc.items()) {
    const auto id = parse_policy_name(key);
    if (!id) throw ConfigError(key, "unknown policy");
    if (!bundle.is_object()) throw ConfigError(key, "expected an object of parameters");
    const auto [first, last] = policy_dimension_range(*id);
    for (const auto& [param, value] : bundle.items()) {
      if (*id == PolicyId::pseudo_bbox && param == "object_class") {
        if (value.is_null()) {
          schedule.pseudo_bbox.object_class.reset();
          continue;
        }
        const auto cls = value.is_string() ? parse_object_class(value.get<std::string>()) : std::nullopt;
        if (!cls) throw ConfigError(key + "." + param, "unknown object class");
        schedule.pseudo_bbox.object_class = cls;
        continue;
      }
      if (*id == PolicyId::pseudo_bbox && param == "position_jitter") {
        if (!value.is_number()) throw ConfigError(key + "." + param, "expected a number");
        schedule.pseudo_bbox.position_jitter = value.get<double>();
        continue;
      }
      std::size_t i = first;
      while (i < last && kDimensions[i].dim.name != param) ++i;
      if (i == last) throw ConfigError(key + "." + param, "unknown parameter");
      if (!value.is_number()) throw ConfigError(key + "." + param, "expected a number");
      const double v = value.get<double>();
      if (kDimensions[i].dim.integral && v != std::round(v)) {
        throw ConfigError(key + "." + param, "expected an integer");
      }
      kDimensions[i].set(schedule, v);
    }
  }
  validate_schedule(schedule);
  return schedule;
}

std::uint64_t derive_policy_seed(std::uint64_t seed, std::string_view frame_id, PolicyId policy) {
  return mix_seed(mix_seed(splitmix64(seed), hash_string(frame_id)), static_cast<std::uint64_t>(policy) + 1);
}

Scene apply_policy(PolicyId policy, const Scene& scene, const PseudoDatabase& db, const PolicySchedule& schedule,
                   Rng& rng) {
  switch (policy) {
    case PolicyId::pseudo_frame: return pseudo_frame(scene, schedule.pseudo_frame, rng);
    case PolicyId::pseudo_bbox: return pseudo_bbox(scene, db, schedule.pseudo_bbox, rng);
    case PolicyId::pseudo_background: return pseudo_background(scene, db, schedule.pseudo_background, rng);
    case PolicyId::random_rotation: return random_rotation_z(scene, schedule.random_rotation, rng);
    case PolicyId::world_scaling: return world_scaling(scene, schedule.world_scaling, rng);
    case PolicyId::global_translate_noise: return global_translate_noise(scene, schedule.global_translate_noise, rng);
    case PolicyId::frustum_dropout: return frustum_dropout(scene, schedule.frustum_dropout, rng);
    case PolicyId::frustum_noise: return frustum_noise(scene, schedule.frustum_noise, rng);
    case PolicyId::random_drop_laser_points: return random_drop_points(scene, schedule.random_drop_laser_points, rng);
  }
  return scene;
}

Scene apply_schedule(const Scene& scene, const PseudoDatabase& db, const PolicySchedule& schedule,
                     std::uint64_t seed, PolicyCounts* modified) {
  Scene current = scene;
  for (std::size_t k = 0; k < kPolicyOrder.size(); ++k) {
    Rng rng(derive_policy_seed(seed, scene.frame_id, kPolicyOrder[k]));
    Scene next = apply_policy(kPolicyOrder[k], current, db, schedule, rng);
    if (modified && !(next == current)) ++(*modified)[k];
    current = std::move(next);
  }
  return current;
}

void MixConfig::validate() const {
  if (!(labeled_weight >= 0.0) || !std::isfinite(labeled_weight)) {
    throw ConfigError("labeled_weight", "must be finite and >= 0");
  }
  if (!(pseudo_weight >= 0.0) || !std::isfinite(pseudo_weight)) {
    throw ConfigError("pseudo_weight", "must be finite and >= 0");
  }
  if (labeled_weight + pseudo_weight <= 0.0) throw ConfigError("pseudo_weight", "both ratio components are 0");
  if (batch_size == 0) throw ConfigError("batch_size", "must be positive");
}

namespace {

class EpochStream {
 public:
  EpochStream(std::size_t size, Rng& rng) : order_(size), rng_(rng) { reshuffle(); }

  std::size_t next() {
    if (pos_ == order_.size()) reshuffle();
    return order_[pos_++];
  }

 private:
  void reshuffle() {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::shuffle(order_.begin(), order_.end(), rng_);
    pos_ = 0;
  }

  std::vector<std::size_t> order_;
  Rng& rng_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<Batch> mix_batches(std::size_t labeled_size, std::size_t pseudo_size, const MixConfig& cfg,
                               std::size_t batch_count, Rng& rng) {
  cfg.validate();
  if (labeled_size == 0 && pseudo_size == 0) throw BothStreamsEmpty();

  EpochStream labeled(labeled_size, rng);
  EpochStream pseudo(pseudo_size, rng);
  const double share = cfg.labeled_weight / (cfg.labeled_weight + cfg.pseudo_weight);

  std::vector<Batch> batches;
  batches.reserve(batch_count);
  std::size_t emitted_labeled = 0;
  for (std::size_t b = 0; b < batch_count; ++b) {
    const double target = static_cast<double>((b + 1) * cfg.batch_size) * share;
    const auto cumulative = static_cast<std::size_t>(std::floor(target + 0.5));
    std::size_t n_labeled = cumulative - emitted_labeled;
    emitted_labeled = cumulative;
    if (labeled_size == 0) n_labeled = 0;
    if (pseudo_size == 0) n_labeled = cfg.batch_size;

    Batch batch;
    batch.reserve(cfg.batch_size);
    for (std::size_t i = 0; i < n_labeled; ++i) batch.push_back({StreamSource::labeled, labeled.next()});
    for (std::size_t i = n_labeled; i < cfg.batch_size; ++i) batch.push_back({StreamSource::pseudo, pseudo.next()});
    batches.push_back(std::move(batch));
  }
  return batches;
}

}  // namespace pseudoaug
