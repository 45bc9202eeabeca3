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

#include <atomic>
#include <set>
#include <thread>

#include "pseudoaug/error.hpp"
#include "pseudoaug/scene.hpp"
#include "pseudoaug/synthetic.hpp"
#include "test_support.hpp"

namespace pseudoaug {
namespace {

LabeledBox pseudo_box(Box7 g, double score, ObjectClass c = ObjectClass::vehicle) {
  return LabeledBox{g, c, score, BoxSource::pseudo};
}

TEST(SplitForeground, NoBoxesMeansAllBackground) {
  Scene s;
  s.frame_id = "f";
  s.points = {{0, 0, 0, 0}, {1, 1, 1, 0}};
  const ForegroundSplit split = split_foreground_background(s, 0.5);
  EXPECT_TRUE(split.crops.empty());
  EXPECT_EQ(split.background, s.points);
}

TEST(SplitForeground, CountsByContainment) {
  std::mt19937_64 rng(1);
  const Box7 box{0, 0, 0, 2, 2, 2, 0.4};
  Scene s;
  s.frame_id = "f";
  s.source = SceneSource::pseudo;
  s.boxes = {pseudo_box(box, 0.9)};
  std::uniform_real_distribution<double> in(-0.9, 0.9), out(3, 9);
  for (int i = 0; i < 10; ++i) s.points.push_back(from_box_frame({in(rng), in(rng), in(rng), 0}, box));
  for (int i = 0; i < 90; ++i) s.points.push_back({out(rng), out(rng), 0, 0});
  const ForegroundSplit split = split_foreground_background(s, 0.5);
  ASSERT_EQ(split.crops.size(), 1u);
  EXPECT_EQ(split.crops[0].points.size(), 10u);
  EXPECT_EQ(split.background.size(), 90u);
}

TEST(SplitForeground, ThresholdOneOnPseudoScene) {
  Scene s;
  s.frame_id = "f";
  s.source = SceneSource::pseudo;
  s.boxes = {pseudo_box(Box7{}, 0.99), pseudo_box(Box7{5, 0, 0, 1, 1, 1, 0}, 0.7)};
  s.points = {{0, 0, 0, 0}, {5, 0, 0, 0}, {9, 9, 9, 0}};
  const ForegroundSplit split = split_foreground_background(s, 1.0);
  EXPECT_TRUE(split.crops.empty());
  EXPECT_EQ(split.background.size(), 3u);
}

TEST(SplitForeground, PartitionMatchesLowestIndexAssignment) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    Scene s;
    s.frame_id = "f";
    s.source = SceneSource::pseudo;
    std::uniform_real_distribution<double> score(0, 1);
    for (int b = 0; b < 4; ++b) s.boxes.push_back(pseudo_box(testing::random_box(rng, 3.0), score(rng)));
    for (int i = 0; i < 300; ++i) s.points.push_back(testing::random_point(rng, 4.0));
    const ForegroundSplit split = split_foreground_background(s, 0.5);

    std::vector<Box7> kept;
    for (const LabeledBox& b : s.boxes) {
      if (b.score >= 0.5) kept.push_back(b.geometry);
    }
    const std::vector<int> owner = testing::oracle_assign(s.points, kept);
    std::vector<std::size_t> expected(kept.size(), 0);
    std::size_t background = 0;
    for (int o : owner) o < 0 ? ++background : ++expected[static_cast<std::size_t>(o)];
    ASSERT_EQ(split.crops.size(), kept.size());
    for (std::size_t k = 0; k < kept.size(); ++k) EXPECT_EQ(split.crops[k].points.size(), expected[k]);
    EXPECT_EQ(split.background.size(), background);
  }
}

TEST(ObjectCrop, RoundTripWithinMicrometer) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const Box7 box = testing::random_box(rng, 20.0, 0.5, 5.0);
    std::vector<Point> world;
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int i = 0; i < 20; ++i) {
      world.push_back(from_box_frame({u(rng) * box.length, u(rng) * box.width, u(rng) * box.height, 0.3}, box));
    }
    const ObjectCrop crop = make_crop(pseudo_box(box, 0.8), world, "src");
    const std::vector<Point> back = crop.world_points();
    ASSERT_EQ(back.size(), world.size());
    for (std::size_t i = 0; i < world.size(); ++i) {
      EXPECT_NEAR(back[i].x, world[i].x, 1e-6);
      EXPECT_NEAR(back[i].y, world[i].y, 1e-6);
      EXPECT_NEAR(back[i].z, world[i].z, 1e-6);
      EXPECT_EQ(back[i].intensity, world[i].intensity);
      // Canonical coordinates stay within the half extents.
      EXPECT_LE(std::abs(crop.points[i].x), box.length / 2 + 1e-9);
      EXPECT_LE(std::abs(crop.points[i].y), box.width / 2 + 1e-9);
      EXPECT_LE(std::abs(crop.points[i].z), box.height / 2 + 1e-9);
    }
  }
}

PseudoDatabase db_with_scores(const std::vector<double>& scores) {
  PseudoDatabaseBuilder builder(0);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    ObjectCrop crop;
    crop.box = pseudo_box(Box7{static_cast<double>(i), 0, 0, 1, 1, 1, 0}, scores[i]);
    crop.source_frame_id = "f";
    builder.add_crop(crop);
  }
  return std::move(builder).build();
}

TEST(SampleCrops, EmptyDatabase) {
  Rng rng(1);
  EXPECT_TRUE(db_sample_crops(PseudoDatabase{}, ObjectClass::vehicle, 10, 0.0, rng).empty());
}

TEST(SampleCrops, PoolExhaustion) {
  Rng rng(1);
  const PseudoDatabase db = db_with_scores({0.9, 0.9, 0.9, 0.9, 0.9});
  const auto got = db_sample_crops(db, ObjectClass::vehicle, 50, 0.5, rng);
  EXPECT_EQ(got.size(), 5u);
  EXPECT_EQ(std::set<const ObjectCrop*>(got.begin(), got.end()).size(), 5u);
}

TEST(SampleCrops, ScoreFilter) {
  std::vector<double> scores;
  for (int i = 0; i < 100; ++i) scores.push_back(i / 100.0);
  const PseudoDatabase db = db_with_scores(scores);
  Rng rng(2);
  const auto got = db_sample_crops(db, ObjectClass::vehicle, 100, 0.8, rng);
  EXPECT_EQ(got.size(), 20u);
  for (const ObjectCrop* c : got) EXPECT_GE(c->box.score, 0.8);
}

TEST(SampleCrops, ClassFilterAndDeterminism) {
  PseudoDatabaseBuilder builder(0);
  for (int i = 0; i < 30; ++i) {
    ObjectCrop crop;
    crop.box = pseudo_box(Box7{}, 0.9, i % 3 == 0 ? ObjectClass::pedestrian : ObjectClass::vehicle);
    builder.add_crop(crop);
  }
  const PseudoDatabase db = std::move(builder).build();
  Rng a(7), b(7);
  const auto ga = db_sample_crops(db, ObjectClass::pedestrian, 4, 0.0, a);
  const auto gb = db_sample_crops(db, ObjectClass::pedestrian, 4, 0.0, b);
  EXPECT_EQ(ga, gb);
  for (const ObjectCrop* c : ga) EXPECT_EQ(c->box.object_class, ObjectClass::pedestrian);
  Rng c(8);
  EXPECT_EQ(db_sample_crops(db, std::nullopt, 100, 0.0, c).size(), 30u);
}

TEST(SampleCrops, RoughlyUniform) {
  std::vector<double> scores(10, 1.0);
  const PseudoDatabase db = db_with_scores(scores);
  std::vector<int> hits(10, 0);
  Rng rng(3);
  for (int i = 0; i < 5000; ++i) {
    for (const ObjectCrop* c : db_sample_crops(db, ObjectClass::vehicle, 1, 0.0, rng)) {
      ++hits[static_cast<std::size_t>(c->box.geometry.cx)];
    }
  }
  for (int h : hits) EXPECT_NEAR(h, 500, 100);
}

TEST(DatabaseBuilder, CropsBucketedPerClass) {
  Scene frame;
  frame.frame_id = "p";
  frame.source = SceneSource::pseudo;
  frame.boxes = {pseudo_box(Box7{0, 0, 0, 1, 1, 1, 0}, 0.9, ObjectClass::vehicle),
                 pseudo_box(Box7{5, 0, 0, 1, 1, 1, 0}, 0.6, ObjectClass::pedestrian),
                 pseudo_box(Box7{9, 0, 0, 1, 1, 1, 0}, 0.3, ObjectClass::vehicle)};
  frame.points = {{0, 0, 0, 0}, {5, 0, 0, 0}};
  PseudoDatabaseBuilder builder(3);
  builder.add_frame(frame);
  const PseudoDatabase db = std::move(builder).build();
  EXPECT_EQ(db.generation, 3);
  EXPECT_EQ(db.crop_count(), 3u);
  EXPECT_EQ(db.crops.at(ObjectClass::vehicle).size(), 2u);
  EXPECT_EQ(db.crops.at(ObjectClass::pedestrian).size(), 1u);
  EXPECT_EQ(db.crops.at(ObjectClass::vehicle)[0].points.size(), 1u);
}

TEST(DatabaseStore, GenerationsStrictlyIncrease) {
  PseudoDatabaseStore store;
  EXPECT_EQ(store.generation(), -1);
  PseudoDatabase g0;
  g0.generation = 0;
  store.publish(g0);
  PseudoDatabase again;
  again.generation = 0;
  EXPECT_THROW(store.publish(again), Error);
  PseudoDatabase g2;
  g2.generation = 2;
  store.publish(g2);
  EXPECT_EQ(store.generation(), 2);
}

TEST(DatabaseStore, ReadersSeeWholeGenerations) {
  PseudoDatabaseStore store;
  std::atomic<bool> done{false};
  std::atomic<int> torn{0};
  std::thread reader([&] {
    while (!done) {
      const auto snap = store.snapshot();
      for (const Scene& f : snap->frames) {
        if (f.frame_id != std::to_string(snap->generation)) ++torn;
      }
    }
  });
  for (int g = 0; g < 200; ++g) {
    PseudoDatabase db;
    db.generation = g;
    for (int i = 0; i < 20; ++i) {
      Scene f;
      f.frame_id = std::to_string(g);
      db.frames.push_back(f);
    }
    store.publish(std::move(db));
  }
  done = true;
  reader.join();
  EXPECT_EQ(torn.load(), 0);
}

TEST(SceneValidation, RejectsBadInput) {
  Scene s;
  EXPECT_THROW(validate(s), Error);
  s.frame_id = "ok";
  validate(s);
  s.points.push_back({std::nan(""), 0, 0, 0});
  EXPECT_THROW(validate(s), Error);
  s.points.clear();
  s.boxes.push_back(LabeledBox{Box7{0, 0, 0, -1, 1, 1, 0}, ObjectClass::vehicle, 1.0, BoxSource::ground_truth});
  EXPECT_THROW(validate(s), Error);
  s.boxes[0] = LabeledBox{Box7{}, ObjectClass::vehicle, 0.7, BoxSource::ground_truth};
  EXPECT_THROW(validate(s), Error);
}

TEST(Synthetic, ScenesAreValidAndDisjoint) {
  Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    const Scene s = generate_scene({}, "s" + std::to_string(i), rng);
    validate(s);
    for (std::size_t a = 0; a < s.boxes.size(); ++a) {
      for (std::size_t b = a + 1; b < s.boxes.size(); ++b) {
        EXPECT_FALSE(bev_overlaps(s.boxes[a].geometry, s.boxes[b].geometry));
      }
    }
    const Scene p = make_noisy_pseudo_labels(s, {}, rng);
    validate(p);
    EXPECT_EQ(p.source, SceneSource::pseudo);
  }
}

}  // namespace
}  // namespace pseudoaug
