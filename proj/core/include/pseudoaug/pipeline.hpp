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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pseudoaug/policies_base.hpp"
#include "pseudoaug/policies_pseudo.hpp"

namespace pseudoaug {

/// The searchable policies, in application order.
enum class PolicyId : std::uint8_t {
  pseudo_frame = 0,
  pseudo_bbox,
  pseudo_background,
  random_rotation,
  world_scaling,
  global_translate_noise,
  frustum_dropout,
  frustum_noise,
  random_drop_laser_points,
};

inline constexpr std::size_t kPolicyCount = 9;

inline constexpr std::array<PolicyId, kPolicyCount> kPolicyOrder{
    PolicyId::pseudo_frame,          PolicyId::pseudo_bbox,     PolicyId::pseudo_background,
    PolicyId::random_rotation,       PolicyId::world_scaling,   PolicyId::global_translate_noise,
    PolicyId::frustum_dropout,       PolicyId::frustum_noise,   PolicyId::random_drop_laser_points,
};

/// Serialized name, e.g. "PseudoFrame", "RandomDropLaserPoints".
std::string_view policy_name(PolicyId id);
std::optional<PolicyId> parse_policy_name(std::string_view name);

struct PolicySchedule {
  PseudoFrameParams pseudo_frame;
  PseudoBBoxParams pseudo_bbox;
  PseudoBackgroundParams pseudo_background;
  RandomRotationParams random_rotation;
  WorldScalingParams world_scaling;
  GlobalTranslateNoiseParams global_translate_noise;
  FrustumDropoutParams frustum_dropout;
  FrustumNoiseParams frustum_noise;
  RandomDropLaserPointsParams random_drop_laser_points;

  friend bool operator==(const PolicySchedule&, const PolicySchedule&) = default;
};

/// One coordinate of the flat hyperparameter vector.
struct ParameterDimension {
  PolicyId policy;
  std::string_view name;  // key inside the policy's bundle
  double min;
  double max;
  bool integral;
};

/// Declared search space, grouped by policy in application order.
std::span<const ParameterDimension> schedule_dimensions();

/// Half-open index range [first, last) of `policy`'s dimensions.
std::pair<std::size_t, std::size_t> policy_dimension_range(PolicyId policy);

std::vector<double> encode_schedule(const PolicySchedule& schedule);

struct DecodedSchedule {
  PolicySchedule schedule;
  /// One entry per clamped component, "<Policy>.<param>: <from> -> <to>".
  std::vector<std::string> clamped;
};

/// Clamps out-of-range components (recording each) and rounds integral ones.
/// Throws DimensionMismatch on a length mismatch. Fields outside the search
/// space (e.g. PseudoBBox's class filter) are taken from `base`.
DecodedSchedule decode_schedule(std::span<const double> vector, const PolicySchedule& base = {});

/// Throws ConfigError naming the first out-of-range parameter.
void validate_schedule(const PolicySchedule& schedule);

/// Human-readable document: policy name -> {param: value}, always listing
/// the nine policies in application order.
nlohmann::ordered_json schedule_to_json(const PolicySchedule& schedule);

/// Missing policies or parameters keep their defaults; unknown keys and
/// out-of-range values throw ConfigError.
PolicySchedule schedule_from_json(const nlohmann::json& doc);

/// Seed for one (frame, policy) pair. Depends on nothing else, so changing
/// another policy never shifts this policy's draws.
std::uint64_t derive_policy_seed(std::uint64_t seed, std::string_view frame_id, PolicyId policy);

/// Runs a single policy with the parameters stored in `schedule`.
Scene apply_policy(PolicyId policy, const Scene& scene, const PseudoDatabase& db, const PolicySchedule& schedule,
                   Rng& rng);

/// Per-policy count of frames the policy actually modified.
using PolicyCounts = std::array<std::size_t, kPolicyCount>;

/// Applies the nine policies in order, each with its own derived seed.
Scene apply_schedule(const Scene& scene, const PseudoDatabase& db, const PolicySchedule& schedule,
                     std::uint64_t seed, PolicyCounts* modified = nullptr);

/// Per-batch labeled:pseudo ratio.
struct MixConfig {
  double labeled_weight = 1.0;
  double pseudo_weight = 1.0;
  std::size_t batch_size = 2;

  /// Throws ConfigError.
  void validate() const;
};

enum class StreamSource : std::uint8_t { labeled, pseudo };

struct BatchItem {
  StreamSource source;
  std::size_t index;

  friend bool operator==(const BatchItem&, const BatchItem&) = default;
};

using Batch = std::vector<BatchItem>;

/// Draws `batch_count` batches from two repeatable streams of the given
/// sizes. Each stream is consumed in reshuffled epochs. Labeled slots per
/// batch follow the cumulative rounded ratio, so every batch is exact when
/// divisible and within one otherwise. An empty stream cedes its slots to the
/// other. Throws BothStreamsEmpty.
std::vector<Batch> mix_batches(std::size_t labeled_size, std::size_t pseudo_size, const MixConfig& cfg,
                               std::size_t batch_count, Rng& rng);

}  // namespace pseudoaug
