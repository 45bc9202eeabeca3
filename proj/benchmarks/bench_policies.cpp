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

#include "pseudoaug/pbt.hpp"
#include "pseudoaug/pipeline.hpp"
#include "pseudoaug/policies_base.hpp"
#include "pseudoaug/policies_pseudo.hpp"
#include "pseudoaug/synthetic.hpp"

namespace pseudoaug {
namespace {

struct Fixture {
  Scene labeled;
  Scene pseudo;
  PseudoDatabase db;
  Fixture() {
    Rng rng(11);
    SyntheticSceneConfig cfg;
    cfg.ground_points = 20000;
    labeled = generate_scene(cfg, "bench", rng);
    pseudo = make_noisy_pseudo_labels(labeled, {}, rng);
    db = make_pseudo_database(16, 0, cfg, {}, rng);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_PseudoFrame(benchmark::State& state) {
  const Fixture& f = fixture();  // built outside the timed loop
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(pseudo_frame(f.pseudo, {1.0, 0.6}, rng));
}
BENCHMARK(BM_PseudoFrame);

void BM_PseudoBBox(benchmark::State& state) {
  Rng rng(2);
  PseudoBBoxParams params{1.0, static_cast<int>(state.range(0)), 0.5, std::nullopt};
  for (auto _ : state) benchmark::DoNotOptimize(pseudo_bbox(fixture().labeled, fixture().db, params, rng));
}
BENCHMARK(BM_PseudoBBox)->Arg(5)->Arg(20);

void BM_PseudoBackground(benchmark::State& state) {
  Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(pseudo_background(fixture().labeled, fixture().db, {1.0}, rng));
}
BENCHMARK(BM_PseudoBackground);

void BM_FrustumDropout(benchmark::State& state) {
  Rng rng(4);
  for (auto _ : state) benchmark::DoNotOptimize(frustum_dropout(fixture().labeled, {1.0, 0.6, 0.5, 0.5}, rng));
}
BENCHMARK(BM_FrustumDropout);

void BM_FullSchedule(benchmark::State& state) {
  Rng rng(5);
  const PolicySchedule schedule = sample_schedule(rng);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(apply_schedule(fixture().labeled, fixture().db, schedule, ++seed));
}
BENCHMARK(BM_FullSchedule);

}  // namespace
}  // namespace pseudoaug
