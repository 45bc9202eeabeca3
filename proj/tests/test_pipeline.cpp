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

#include <gtest/gtest.h>

#include <set>

#include "pseudoaug/error.hpp"
#include "pseudoaug/io.hpp"
#include "pseudoaug/pipeline.hpp"
#include "pseudoaug/synthetic.hpp"

namespace pseudoaug {
namespace {

PolicySchedule all_off() {
  PolicySchedule s;
  s.pseudo_frame.probability = 0;
  s.pseudo_bbox.probability = 0;
  s.pseudo_background.probability = 0;
  s.random_rotation.probability = 0;
  s.world_scaling.probability = 0;
  s.global_translate_noise.probability = 0;
  s.frustum_dropout.probability = 0;
  s.frustum_noise.probability = 0;
  s.random_drop_laser_points.probability = 0;
  return s;
}

PolicySchedule all_on() {
  PolicySchedule s;
  s.pseudo_frame = {1.0, 0.6};
  s.pseudo_bbox = {1.0, 6, 0.5, std::nullopt};
  s.pseudo_background = {0.7};
  s.random_rotation = {1.0, 0.5};
  s.world_scaling = {1.0, 0.9, 1.1};
  s.global_translate_noise = {1.0, 0.2, 0.2, 0.05};
  s.frustum_dropout = {1.0, 0.5, 0.4, 0.5};
  s.frustum_noise = {1.0, 0.5, 0.4, 0.1};
  s.random_drop_laser_points = {1.0, 0.9};
  return s;
}

TEST(Schedule, DimensionTable) {
  const auto dims = schedule_dimensions();
  EXPECT_EQ(dims.size(), 25u);
  EXPECT_EQ(encode_schedule(PolicySchedule{}).size(), dims.size());
  std::size_t expected_first = 0;
  for (PolicyId id : kPolicyOrder) {
    const auto [first, last] = policy_dimension_range(id);
    EXPECT_EQ(first, expected_first);
    EXPECT_GT(last, first);
    for (std::size_t i = first; i < last; ++i) EXPECT_EQ(dims[i].policy, id);
    EXPECT_EQ(dims[first].name, "probability");
    expected_first = last;
  }
  EXPECT_EQ(expected_first, dims.size());
  for (const ParameterDimension& d : dims) EXPECT_LT(d.min, d.max);
}

TEST(Schedule, DimensionRanges) {
  auto find = [](PolicyId id, std::string_view name) {
    for (const ParameterDimension& d : schedule_dimensions()) {
      if (d.policy == id && d.name == name) return d;
    }
    ADD_FAILURE() << name;
    return ParameterDimension{};
  };
  const auto ft = find(PolicyId::pseudo_frame, "score_threshold");
  EXPECT_EQ(ft.min, 0.5);
  EXPECT_EQ(ft.max, 1.0);
  const auto n = find(PolicyId::pseudo_bbox, "num_objects");
  EXPECT_EQ(n.min, 0.0);
  EXPECT_EQ(n.max, 20.0);
  EXPECT_TRUE(n.integral);
  const auto bt = find(PolicyId::pseudo_bbox, "score_threshold");
  EXPECT_EQ(bt.min, 0.5);
  EXPECT_EQ(bt.max, 1.0);
  EXPECT_EQ(policy_dimension_range(PolicyId::pseudo_background).second -
                policy_dimension_range(PolicyId::pseudo_background).first,
            1u);
}

TEST(Schedule, EncodeDecodeRoundTrip) {
  const PolicySchedule s = all_on();
  const std::vector<double> v = encode_schedule(s);
  const DecodedSchedule d = decode_schedule(v);
  EXPECT_TRUE(d.clamped.empty());
  EXPECT_EQ(d.schedule, s);
  EXPECT_EQ(encode_schedule(d.schedule), v);
}

TEST(Schedule, DecodeClampsAndRecords) {
  std::vector<double> v = encode_schedule(PolicySchedule{});
  v[0] = 1.2;
  const auto [first, last] = policy_dimension_range(PolicyId::pseudo_bbox);
  v[first + 1] = 7.6;
  v[first + 2] = 0.1;
  const DecodedSchedule d = decode_schedule(v);
  EXPECT_EQ(d.schedule.pseudo_frame.probability, 1.0);
  EXPECT_EQ(d.schedule.pseudo_bbox.num_objects, 8);
  EXPECT_EQ(d.schedule.pseudo_bbox.score_threshold, 0.5);
  ASSERT_EQ(d.clamped.size(), 2u);
  EXPECT_NE(d.clamped[0].find("PseudoFrame.probability"), std::string::npos);
  EXPECT_NE(d.clamped[1].find("PseudoBBox.score_threshold"), std::string::npos);
  (void)last;
}

TEST(Schedule, DecodeLengthMismatch) {
  const std::vector<double> v(24, 0.5);
  EXPECT_THROW(decode_schedule(v), DimensionMismatch);
}

TEST(Schedule, DecodeKeepsClassFilterFromBase) {
  PolicySchedule base;
  base.pseudo_bbox.object_class = ObjectClass::pedestrian;
  const DecodedSchedule d = decode_schedule(encode_schedule(PolicySchedule{}), base);
  EXPECT_EQ(d.schedule.pseudo_bbox.object_class, ObjectClass::pedestrian);
}

TEST(Schedule, JsonListsPoliciesInOrder) {
  const nlohmann::ordered_json doc = schedule_to_json(all_on());
  std::vector<std::string> keys;
  for (auto it = doc.begin(); it != doc.end(); ++it) keys.push_back(it.key());
  const std::vector<std::string> expected{"PseudoFrame",   "PseudoBBox",           "PseudoBackground",
                                          "RandomRotation", "WorldScaling",        "GlobalTranslateNoise",
                                          "FrustumDropout", "FrustumNoise",        "RandomDropLaserPoints"};
  EXPECT_EQ(keys, expected);
  EXPECT_TRUE(doc["PseudoBBox"]["num_objects"].is_number_integer());
  EXPECT_EQ(schedule_from_json(nlohmann::json::parse(doc.dump())), all_on());
}

TEST(Schedule, JsonValidation) {
  using nlohmann::json;
  EXPECT_EQ(schedule_from_json(json::object()), PolicySchedule{});
  const PolicySchedule partial = schedule_from_json(json{{"PseudoFrame", {{"probability", 0.5}}}});
  EXPECT_EQ(partial.pseudo_frame.probability, 0.5);
  EXPECT_EQ(partial.pseudo_frame.score_threshold, PseudoFrameParams{}.score_threshold);
  EXPECT_THROW(schedule_from_json(json{{"Nope", json::object()}}), ConfigError);
  EXPECT_THROW(schedule_from_json(json{{"PseudoFrame", {{"speed", 1}}}}), ConfigError);
  EXPECT_THROW(schedule_from_json(json{{"PseudoFrame", {{"probability", 1.5}}}}), ConfigError);
  EXPECT_THROW(schedule_from_json(json{{"PseudoFrame", {{"probability", "high"}}}}), ConfigError);
  EXPECT_THROW(schedule_from_json(json{{"PseudoBBox", {{"num_objects", 2.5}}}}), ConfigError);
  EXPECT_NO_THROW(schedule_from_json(json{{"WorldScaling", {{"min_scale", 0.8}, {"max_scale", 1.0}}}}));
  EXPECT_THROW(schedule_from_json(json::array()), ConfigError);
}

TEST(Schedule, PositionJitterIsOptionalInJson) {
  PolicySchedule s;
  EXPECT_FALSE(schedule_to_json(s)["PseudoBBox"].contains("position_jitter"));
  s.pseudo_bbox.position_jitter = 0.5;
  const auto doc = schedule_to_json(s);
  EXPECT_EQ(doc["PseudoBBox"]["position_jitter"], 0.5);
  EXPECT_EQ(schedule_from_json(nlohmann::json::parse(doc.dump())), s);
  EXPECT_EQ(encode_schedule(s), encode_schedule(PolicySchedule{}));
  EXPECT_THROW(schedule_from_json(nlohmann::json::parse(R"({"PseudoBBox": {"position_jitter": -1}})")), ConfigError);
  EXPECT_THROW(schedule_from_json(nlohmann::json::parse(R"({"PseudoBBox": {"position_jitter": "x"}})")), ConfigError);
}

TEST(Schedule, PolicyNames) {
  for (PolicyId id : kPolicyOrder) EXPECT_EQ(parse_policy_name(policy_name(id)), id);
  EXPECT_FALSE(parse_policy_name("RotateZ").has_value());
}

struct Fixture {
  PseudoDatabase db;
  std::vector<Scene> frames;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture out;
    Rng rng(31);
    out.db = make_pseudo_database(8, 0, {}, {}, rng);
    for (int i = 0; i < 6; ++i) out.frames.push_back(generate_scene({}, "frame" + std::to_string(i), rng));
    return out;
  }();
  return f;
}

TEST(ApplySchedule, AllOffIsIdentity) {
  PolicyCounts counts{};
  for (const Scene& s : fixture().frames) {
    EXPECT_EQ(apply_schedule(s, fixture().db, all_off(), 7, &counts), s);
  }
  for (std::size_t c : counts) EXPECT_EQ(c, 0u);
}

TEST(ApplySchedule, SinglePolicyMatchesDirectCall) {
  PolicySchedule only = all_off();
  only.pseudo_frame = {1.0, 0.7};
  for (const Scene& labeled : fixture().frames) {
    for (const Scene& s : {labeled, fixture().db.frames[0]}) {
      Rng rng(derive_policy_seed(3, s.frame_id, PolicyId::pseudo_frame));
      EXPECT_EQ(apply_schedule(s, fixture().db, only, 3), pseudo_frame(s, only.pseudo_frame, rng));
    }
  }
}

TEST(ApplySchedule, Deterministic) {
  for (const Scene& s : fixture().frames) {
    EXPECT_EQ(encode_frame(apply_schedule(s, fixture().db, all_on(), 11)),
              encode_frame(apply_schedule(s, fixture().db, all_on(), 11)));
  }
}

TEST(ApplySchedule, SeedIsolation) {
  // Disabling every policy but the last must leave the last policy's draws
  // untouched, whatever the others were set to before.
  const Scene& s = fixture().frames[0];
  PolicySchedule tail = all_off();
  tail.random_drop_laser_points = {1.0, 0.5};
  Rng rng(derive_policy_seed(5, s.frame_id, PolicyId::random_drop_laser_points));
  EXPECT_EQ(apply_schedule(s, fixture().db, tail, 5), random_drop_points(s, tail.random_drop_laser_points, rng));

  // Toggling one policy's probability changes no other policy's seed.
  std::set<std::uint64_t> seeds;
  for (PolicyId id : kPolicyOrder) seeds.insert(derive_policy_seed(5, s.frame_id, id));
  EXPECT_EQ(seeds.size(), kPolicyCount);
  EXPECT_NE(derive_policy_seed(5, "a", PolicyId::pseudo_frame), derive_policy_seed(5, "b", PolicyId::pseudo_frame));
  EXPECT_NE(derive_policy_seed(5, "a", PolicyId::pseudo_frame), derive_policy_seed(6, "a", PolicyId::pseudo_frame));

  // Toggling a policy that is a no-op on this input changes nothing else.
  PolicySchedule with_rotation_off = all_on();
  with_rotation_off.pseudo_background.probability = 0;
  PolicySchedule with_rotation_noop = with_rotation_off;
  with_rotation_noop.random_rotation = {1.0, 0.0};
  with_rotation_off.random_rotation.probability = 0;
  const Scene a = apply_schedule(s, fixture().db, with_rotation_off, 9);
  const Scene b = apply_schedule(s, fixture().db, with_rotation_noop, 9);
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    EXPECT_NEAR(a.points[i].x, b.points[i].x, 1e-9);
    EXPECT_NEAR(a.points[i].y, b.points[i].y, 1e-9);
  }
}

TEST(ApplySchedule, CountsModifiedFrames) {
  PolicySchedule s = all_off();
  s.random_drop_laser_points = {1.0, 0.5};
  PolicyCounts counts{};
  for (const Scene& f : fixture().frames) apply_schedule(f, fixture().db, s, 1, &counts);
  EXPECT_EQ(counts[static_cast<std::size_t>(PolicyId::random_drop_laser_points)], fixture().frames.size());
  EXPECT_EQ(counts[0], 0u);
}

std::pair<std::size_t, std::size_t> split(const Batch& b) {
  std::size_t l = 0;
  for (const BatchItem& it : b) l += it.source == StreamSource::labeled;
  return {l, b.size() - l};
}

TEST(MixBatches, LabeledOnly) {
  Rng rng(1);
  const auto batches = mix_batches(10, 10, {1.0, 0.0, 4}, 20, rng);
  for (const Batch& b : batches) EXPECT_EQ(split(b), (std::pair<std::size_t, std::size_t>{4, 0}));
}

TEST(MixBatches, EvenSplit) {
  Rng rng(2);
  const auto batches = mix_batches(7, 9, {1.0, 1.0, 4}, 50, rng);
  ASSERT_EQ(batches.size(), 50u);
  for (const Batch& b : batches) EXPECT_EQ(split(b), (std::pair<std::size_t, std::size_t>{2, 2}));
}

TEST(MixBatches, OddBatchAlternates) {
  Rng rng(3);
  const auto batches = mix_batches(7, 9, {1.0, 1.0, 5}, 40, rng);
  for (std::size_t i = 0; i < batches.size(); ++i) {
    const auto [l, p] = split(batches[i]);
    EXPECT_EQ(l + p, 5u);
    EXPECT_TRUE((l == 3 && p == 2) || (l == 2 && p == 3));
    if (i > 0) EXPECT_NE(split(batches[i - 1]).first, l);
  }
}

TEST(MixBatches, RatioWithinOne) {
  Rng rng(4);
  const MixConfig cfg{1.0, 2.0, 7};
  const auto batches = mix_batches(5, 5, cfg, 300, rng);
  std::size_t total_l = 0;
  for (const Batch& b : batches) {
    const double target = 7.0 / 3.0;
    EXPECT_LE(std::abs(static_cast<double>(split(b).first) - target), 1.0);
    total_l += split(b).first;
  }
  EXPECT_NEAR(static_cast<double>(total_l) / 300.0, 7.0 / 3.0, 0.01);
}

TEST(MixBatches, EpochsCoverEveryIndex) {
  Rng rng(5);
  const auto batches = mix_batches(6, 4, {1.0, 1.0, 2}, 6, rng);
  std::multiset<std::size_t> labeled, pseudo;
  for (const Batch& b : batches) {
    for (const BatchItem& it : b) (it.source == StreamSource::labeled ? labeled : pseudo).insert(it.index);
  }
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(labeled.count(i), 1u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_GE(pseudo.count(i), 1u);
}

TEST(MixBatches, EmptyStreamCedes) {
  Rng rng(6);
  for (const Batch& b : mix_batches(3, 0, {1.0, 1.0, 4}, 5, rng)) EXPECT_EQ(split(b).first, 4u);
  for (const Batch& b : mix_batches(0, 3, {1.0, 1.0, 4}, 5, rng)) EXPECT_EQ(split(b).second, 4u);
  EXPECT_THROW(mix_batches(0, 0, {1.0, 1.0, 4}, 5, rng), BothStreamsEmpty);
}

TEST(MixBatches, ConfigValidation) {
  Rng rng(7);
  EXPECT_THROW(mix_batches(3, 3, {0.0, 0.0, 4}, 1, rng), ConfigError);
  EXPECT_THROW(mix_batches(3, 3, {-1.0, 1.0, 4}, 1, rng), ConfigError);
  EXPECT_THROW(mix_batches(3, 3, {1.0, 1.0, 0}, 1, rng), ConfigError);
  Rng a(8), b(8);
  EXPECT_EQ(mix_batches(5, 5, {}, 10, a), mix_batches(5, 5, {}, 10, b));
}

}  // namespace
}  // namespace pseudoaug
