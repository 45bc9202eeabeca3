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


#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "pseudoaug/geom.hpp"

namespace pseudoaug {
namespace {

Box7 random_box(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> c(-3, 3), d(0.5, 4), h(-3.1, 3.1);
  return {c(gen), c(gen), 0.0, d(gen), d(gen), d(gen), h(gen)};
}

void BM_AssignPoints(benchmark::State& state) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-40, 40);
  std::vector<Point> points(static_cast<std::size_t>(state.range(0)));
  for (Point& p : points) p = {u(gen), u(gen), u(gen) / 20, 0.5};
  std::vector<Box7> boxes;
  for (int i = 0; i < state.range(1); ++i) {
    Box7 b = random_box(gen);
    b.cx *= 10;
    b.cy *= 10;
    boxes.push_back(b);
  }
  for (auto _ : state) benchmark::DoNotOptimize(assign_points_to_boxes(points, boxes));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AssignPoints)->Args({20000, 10})->Args({120000, 30});

void BM_BevOverlap(benchmark::State& state) {
  std::mt19937_64 gen(2);
  std::vector<Box7> boxes;
  for (int i = 0; i < 256; ++i) boxes.push_back(random_box(gen));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bev_overlap(boxes[i & 255], boxes[(i + 1) & 255]));
    ++i;
  }
}
BENCHMARK(BM_BevOverlap);

void BM_GroundPlane(benchmark::State& state) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-40, 40), n(-0.05, 0.05);
  std::vector<Point> points(20000);
  for (Point& p : points) p = {u(gen), u(gen), n(gen) - 1.7, 0.1};
  for (auto _ : state) benchmark::DoNotOptimize(fit_ground_plane_from_histogram(points));
}
BENCHMARK(BM_GroundPlane);

}  // namespace
}  // namespace pseudoaug

BENCHMARK_MAIN();
