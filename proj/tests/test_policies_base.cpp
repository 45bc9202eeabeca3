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

#include <algorithm>
#include <numbers>

#include "pseudoaug/policies_base.hpp"
#include "pseudoaug/synthetic.hpp"
#include "test_support.hpp"

namespace pseudoaug {
namespace {

constexpr double kPi = std::numbers::pi;

Scene random_scene(std::mt19937_64& gen, int points = 300, int boxes = 4) {
  Scene s;
  s.frame_id = "b";
  for (int i = 0; i < boxes; ++i) {
    s.boxes.push_back(LabeledBox{testing::random_box(gen, 4), ObjectClass::vehicle, 1.0, BoxSource::ground_truth});
  }
  for (int i = 0; i < points; ++i) s.points.push_back(testing::random_point(gen, 6));
  return s;
}

std::vector<std::vector<bool>> containment(const Scene& s) {
  std::vector<std::vector<bool>> m;
  for (const Point& p : s.points) {
    std::vector<bool> row;
    for (const LabeledBox& b : s.boxes) row.push_back(testing::oracle_in_box(p, b.geometry));
    m.push_back(row);
  }
  return m;
}

// Angular window check using the horizontal angle between unit vectors.
bool oracle_in_window(const Point& p, const FrustumWindow& w) {
  const double r = std::hypot(p.x, p.y);
  const double cosang = (p.x * std::cos(w.theta_center) + p.y * std::sin(w.theta_center)) / r;
  const double dtheta = std::acos(std::clamp(cosang, -1.0, 1.0));
  const double phi = std::asin(p.z / std::sqrt(r * r + p.z * p.z));
  return dtheta <= w.theta_width / 2 + 1e-9 && phi >= w.phi_low - 1e-9 && phi <= w.phi_high + 1e-9;
}

bool oracle_strictly_outside(const Point& p, const FrustumWindow& w) {
  const double r = std::hypot(p.x, p.y);
  const double cosang = (p.x * std::cos(w.theta_center) + p.y * std::sin(w.theta_center)) / r;
  const double dtheta = std::acos(std::clamp(cosang, -1.0, 1.0));
  const double phi = std::asin(p.z / std::sqrt(r * r + p.z * p.z));
  return dtheta > w.theta_width / 2 + 1e-9 || phi < w.phi_low - 1e-9 || phi > w.phi_high + 1e-9;
}

TEST(RandomRotation, Identities) {
  std::mt19937_64 gen(1);
  const Scene s = random_scene(gen);
  Rng rng(1);
  EXPECT_EQ(random_rotation_z(s, {0.0, kPi}, rng), s);
  const Scene zero = random_rotation_z(s, {1.0, 0.0}, rng);
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    EXPECT_NEAR(zero.points[i].x, s.points[i].x, 1e-12);
    EXPECT_NEAR(zero.points[i].y, s.points[i].y, 1e-12);
  }
  const Scene twice = transform_scene(transform_scene(s, RotateZ{kPi}), RotateZ{kPi});
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    EXPECT_NEAR(twice.points[i].x, s.points[i].x, 1e-9);
    EXPECT_NEAR(twice.points[i].y, s.points[i].y, 1e-9);
  }
  for (std::size_t i = 0; i < s.boxes.size(); ++i) {
    EXPECT_NEAR(std::abs(normalize_heading(twice.boxes[i].geometry.heading - s.boxes[i].geometry.heading)), 0.0,
                1e-9);
  }
}

TEST(RandomRotation, AnglesStayInRangeAndPreserveContainment) {
  std::mt19937_64 gen(2);
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    Scene s = random_scene(gen, 200, 3);
    s.points.push_back({1, 0, 0, 0});
    const Scene out = random_rotation_z(s, {1.0, 0.5}, rng);
    const Point& probe = out.points.back();
    EXPECT_LE(std::abs(std::atan2(probe.y, probe.x)), 0.5 + 1e-12);
    const auto before = containment(s);
    const auto after = containment(out);
    int mismatches = 0;
    for (std::size_t i = 0; i < before.size(); ++i) mismatches += before[i] != after[i];
    EXPECT_EQ(mismatches, 0);
  }
}

TEST(FlipY, Examples) {
  Scene s;
  s.frame_id = "f";
  s.points = {{1, 2, 3, 0.5}};
  s.boxes = {LabeledBox{Box7{0, 1, 0, 2, 1, 1, 0.3}, ObjectClass::vehicle, 1.0, BoxSource::ground_truth}};
  Rng rng(3);
  const Scene once = random_flip_y(s, {1.0}, rng);
  EXPECT_EQ(once.points[0].y, -2.0);
  EXPECT_DOUBLE_EQ(once.boxes[0].geometry.heading, -0.3);
  EXPECT_EQ(once.boxes[0].geometry.cy, -1.0);
  EXPECT_EQ(random_flip_y(once, {1.0}, rng), s);
  EXPECT_EQ(random_flip_y(s, {0.0}, rng), s);
}

TEST(WorldScaling, Examples) {
  Scene s;
  s.frame_id = "w";
  s.points = {{1, 2, 3, 0.25}};
  s.boxes = {LabeledBox{Box7{1, 1, 1, 1, 2, 3, 0.2}, ObjectClass::vehicle, 1.0, BoxSource::ground_truth}};
  Rng rng(4);
  EXPECT_EQ(world_scaling(s, {1.0, 1.0, 1.0}, rng), s);
  const Scene twice = world_scaling(s, {1.0, 2.0, 2.0}, rng);
  const Box7& g = twice.boxes[0].geometry;
  EXPECT_EQ(g.length, 2.0);
  EXPECT_EQ(g.width, 4.0);
  EXPECT_EQ(g.height, 6.0);
  EXPECT_EQ(g.heading, 0.2);
  EXPECT_EQ(twice.points[0].z, 6.0);
  EXPECT_EQ(twice.points[0].intensity, 0.25);
}

TEST(WorldScaling, ContainmentPreserved) {
  std::mt19937_64 gen(5);
  Rng rng(5);
  int agree = 0, total = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    Scene s;
    s.frame_id = "w";
    s.boxes = {LabeledBox{testing::random_box(gen, 3), ObjectClass::vehicle, 1.0, BoxSource::ground_truth}};
    s.points = {testing::random_point(gen, 3)};
    const Scene out = world_scaling(s, {1.0, 0.8, 1.2}, rng);
    agree += testing::oracle_in_box(s.points[0], s.boxes[0].geometry) ==
             testing::oracle_in_box(out.points[0], out.boxes[0].geometry);
    ++total;
  }
  EXPECT_EQ(agree, total);
}

TEST(GlobalTranslateNoise, IdentityAndRelativeGeometry) {
  std::mt19937_64 gen(6);
  const Scene s = random_scene(gen);
  Rng rng(6);
  const Scene same = global_translate_noise(s, {1.0, 0, 0, 0}, rng);
  EXPECT_EQ(same.points, s.points);
  const Scene moved = global_translate_noise(s, {1.0, 0.5, 0.5, 0.2}, rng);
  const double dx = moved.points[0].x - s.points[0].x;
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    EXPECT_NEAR(moved.points[i].x - s.points[i].x, dx, 1e-12);
  }
  for (std::size_t i = 0; i < s.boxes.size(); ++i) {
    EXPECT_NEAR(moved.boxes[i].geometry.cx - s.boxes[i].geometry.cx, dx, 1e-12);
  }
  EXPECT_EQ(containment(moved), containment(s));
}

TEST(GlobalTranslateNoise, MeanOffsetNearZero) {
  Scene s;
  s.frame_id = "t";
  s.points = {{0, 0, 0, 0}};
  Rng rng(7);
  const int n = 10000;
  const double sigma = 0.3;
  double sum_x = 0, sum_y = 0, sum_z = 0;
  for (int i = 0; i < n; ++i) {
    const Scene out = global_translate_noise(s, {1.0, sigma, sigma, sigma}, rng);
    sum_x += out.points[0].x;
    sum_y += out.points[0].y;
    sum_z += out.points[0].z;
  }
  const double bound = 3 * sigma / std::sqrt(n);
  EXPECT_LE(std::abs(sum_x / n), bound);
  EXPECT_LE(std::abs(sum_y / n), bound);
  EXPECT_LE(std::abs(sum_z / n), bound);
}

TEST(FrustumWindow, ElevationSlidesIntoRange) {
  Rng rng(8);
  const std::vector<Point> up{{0.1, 0, 10, 0}};
  const FrustumWindow w = draw_frustum_window(up, 1.0, 1.0, rng);
  EXPECT_DOUBLE_EQ(w.phi_high, kPi / 2);
  EXPECT_NEAR(w.phi_high - w.phi_low, 1.0, 1e-12);
  const FrustumWindow all = draw_frustum_window(up, 2 * kPi, kPi, rng);
  EXPECT_DOUBLE_EQ(all.phi_low, -kPi / 2);
  EXPECT_DOUBLE_EQ(all.phi_high, kPi / 2);
}

TEST(FrustumDropout, Identities) {
  std::mt19937_64 gen(9);
  const Scene s = random_scene(gen);
  Rng rng(9);
  EXPECT_EQ(frustum_dropout(s, {1.0, kPi, kPi / 2, 0.0}, rng), s);
  EXPECT_EQ(frustum_dropout(s, {0.0, kPi, kPi / 2, 1.0}, rng), s);
  const Scene gone = frustum_dropout(s, {1.0, 2 * kPi, kPi, 1.0}, rng);
  EXPECT_TRUE(gone.points.empty());
  EXPECT_EQ(gone.boxes, s.boxes);
}

TEST(FrustumDropout, DeletedPointsLieInWindow) {
  std::mt19937_64 gen(10);
  Rng rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const Scene s = random_scene(gen, 400, 0);
    // Replay the window: one Bernoulli draw, then the window draw.
    Rng replay = rng;
    (void)bernoulli(replay, 1.0);
    const FrustumWindow w = draw_frustum_window(s.points, 0.8, 0.6, replay);
    const Scene out = frustum_dropout(s, {1.0, 0.8, 0.6, 0.7}, rng);
    std::size_t out_idx = 0;
    for (const Point& p : s.points) {
      if (out_idx < out.points.size() && out.points[out_idx] == p) {
        ++out_idx;
        continue;
      }
      EXPECT_TRUE(oracle_in_window(p, w));
    }
    EXPECT_EQ(out_idx, out.points.size());
    for (const Point& p : s.points) {
      if (oracle_strictly_outside(p, w)) {
        EXPECT_NE(std::find(out.points.begin(), out.points.end(), p), out.points.end());
      }
    }
  }
}

TEST(FrustumNoise, Identities) {
  std::mt19937_64 gen(11);
  const Scene s = random_scene(gen);
  Rng rng(11);
  EXPECT_EQ(frustum_noise(s, {1.0, kPi, kPi / 2, 0.0}, rng), s);
  EXPECT_EQ(frustum_noise(s, {0.0, kPi, kPi / 2, 0.5}, rng), s);
}

TEST(FrustumNoise, KeepsDirectionsAndOutOfWindowPoints) {
  std::mt19937_64 gen(12);
  Rng rng(12);
  int moved = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Scene s = random_scene(gen, 300, 2);
    Rng replay = rng;
    (void)bernoulli(replay, 1.0);
    const FrustumWindow w = draw_frustum_window(s.points, 1.2, 0.8, replay);
    const Scene out = frustum_noise(s, {1.0, 1.2, 0.8, 0.3}, rng);
    ASSERT_EQ(out.points.size(), s.points.size());
    EXPECT_EQ(out.boxes, s.boxes);
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      const Point& a = s.points[i];
      const Point& b = out.points[i];
      if (oracle_strictly_outside(a, w)) {
        EXPECT_EQ(a, b);
        continue;
      }
      const double ra = std::sqrt(a.x * a.x + a.y * a.y + a.z * a.z);
      const double rb = std::sqrt(b.x * b.x + b.y * b.y + b.z * b.z);
      EXPECT_NEAR(a.x / ra, b.x / rb, 1e-6);
      EXPECT_NEAR(a.y / ra, b.y / rb, 1e-6);
      EXPECT_NEAR(a.z / ra, b.z / rb, 1e-6);
      EXPECT_EQ(a.intensity, b.intensity);
      moved += !(a == b);
    }
  }
  EXPECT_GT(moved, 0);
}

TEST(RandomDropPoints, Examples) {
  Scene s;
  s.frame_id = "d";
  for (int i = 0; i < 10000; ++i) s.points.push_back({static_cast<double>(i), 0, 0, 0});
  Rng rng(13);
  EXPECT_EQ(random_drop_points(s, {1.0, 1.0}, rng), s);
  const Scene half = random_drop_points(s, {1.0, 0.5}, rng);
  const double sd = std::sqrt(10000 * 0.25);
  EXPECT_NEAR(static_cast<double>(half.points.size()), 5000.0, 4 * sd);
  EXPECT_TRUE(std::is_sorted(half.points.begin(), half.points.end(),
                             [](const Point& a, const Point& b) { return a.x < b.x; }));
  EXPECT_EQ(random_drop_points(s, {0.0, 0.1}, rng), s);
}

TEST(GTBBoxPaste, SharesPasteInvariants) {
  Rng rng(14);
  PseudoDatabaseBuilder builder(0);
  for (int i = 0; i < 10; ++i) {
    const Scene donor = generate_scene({}, "d" + std::to_string(i), rng);
    for (ObjectCrop& c : extract_crops(donor)) builder.add_crop(std::move(c));
  }
  const PseudoDatabase labeled_db = std::move(builder).build();
  for (int trial = 0; trial < 50; ++trial) {
    const Scene s = generate_scene({}, "s", rng);
    EXPECT_EQ(gt_bbox_paste(s, PseudoDatabase{}, {1.0, 10}, rng), s);
    const Scene out = gt_bbox_paste(s, labeled_db, {1.0, 10}, rng);
    EXPECT_LE(out.boxes.size(), s.boxes.size() + 10);
    for (std::size_t a = 0; a < out.boxes.size(); ++a) {
      EXPECT_EQ(out.boxes[a].source, BoxSource::ground_truth);
      for (std::size_t b = a + 1; b < out.boxes.size(); ++b) {
        EXPECT_FALSE(bev_overlaps(out.boxes[a].geometry, out.boxes[b].geometry));
      }
    }
  }
}

TEST(BasePolicies, DeterministicPerSeed) {
  std::mt19937_64 gen(15);
  const Scene s = random_scene(gen);
  Rng a(5), b(5);
  EXPECT_EQ(random_rotation_z(s, {1.0, kPi}, a), random_rotation_z(s, {1.0, kPi}, b));
  EXPECT_EQ(world_scaling(s, {1.0, 0.9, 1.1}, a), world_scaling(s, {1.0, 0.9, 1.1}, b));
  EXPECT_EQ(frustum_dropout(s, {1.0, 1, 1, 0.5}, a), frustum_dropout(s, {1.0, 1, 1, 0.5}, b));
  EXPECT_EQ(frustum_noise(s, {1.0, 1, 1, 0.5}, a), frustum_noise(s, {1.0, 1, 1, 0.5}, b));
  EXPECT_EQ(random_drop_points(s, {1.0, 0.5}, a), random_drop_points(s, {1.0, 0.5}, b));
  EXPECT_EQ(global_translate_noise(s, {1.0, 1, 1, 1}, a), global_translate_noise(s, {1.0, 1, 1, 1}, b));
}

}  // namespace
}  // namespace pseudoaug
