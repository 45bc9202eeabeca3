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
#include <memory>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "pseudoaug/pipeline.hpp"

namespace pseudoaug {

struct SearchConfig {
  std::int64_t total_steps = 20000;     // N
  std::int64_t generation_step = 1000;  // K
  std::size_t population_size = 16;     // M
  std::size_t teacher_count = 10;
  double teacher_min_ap = 0.35;
  double explore_rate = 0.8;
  std::size_t max_policies_mutated = 3;
  double truncation_fraction = 0.25;
  /// Restrict teachers to the generation just finished instead of every
  /// prior generation.
  bool teachers_previous_generation_only = false;
  double nms_iou = 0.5;
  /// Fused pseudo boxes scoring below this are not stored in the database.
  double pseudo_min_score = 0.1;
  MixConfig mix;
  /// Concurrent trainings; 0 picks the hardware concurrency.
  std::size_t workers = 0;

  /// Throws ConfigError naming the offending field.
  void validate() const;

  /// ceil(N / K).
  std::size_t generation_count() const;
};

/// Unknown keys throw ConfigError; missing keys keep their defaults.
SearchConfig search_config_from_json(const nlohmann::json& doc);
nlohmann::ordered_json search_config_to_json(const SearchConfig& cfg);

/// Trainer-owned model state. The search only copies handles around.
class Model {
 public:
  virtual ~Model() = default;
};

using ModelHandle = std::shared_ptr<const Model>;

struct TrialState {
  int trial_id = 0;
  PolicySchedule schedule;
  ModelHandle model;
  /// One objective per completed generation.
  std::vector<double> objectives;
  bool failed = false;  // outcome of the latest generation
};

/// Uniform draw of every searchable dimension within its declared range.
PolicySchedule sample_schedule(Rng& rng, const PolicySchedule& base = {});

/// Replaces `policy`'s bundle with a uniform draw.
void resample_policy(PolicySchedule& schedule, PolicyId policy, Rng& rng);

/// M trials with ids 0..M-1 and uniformly sampled schedules.
std::vector<TrialState> init_population(const SearchConfig& cfg, Rng& rng);

struct CloneEvent {
  int recipient = 0;
  int donor = 0;
  int generation = 0;  // generation the recipient trains next; set by run_search
};

/// Truncation selection on the latest objectives. Each of the bottom
/// ceil(fraction * M) trials copies schedule and model from a uniformly chosen
/// trial in the top ceil(fraction * M), but only when that donor is strictly
/// better; otherwise the trial is left as is. Ranking ties are broken by
/// trial_id. Returns the clones made, in recipient order of rank.
std::vector<CloneEvent> exploit(std::vector<TrialState>& population, const SearchConfig& cfg, Rng& rng);

struct ExploreOutcome {
  PolicySchedule schedule;
  /// Policies whose bundle was resampled; empty when the trial was left alone.
  std::vector<PolicyId> mutated;
};

/// With probability explore_rate, resamples the bundles of k distinct
/// policies with k uniform in {1..max_policies_mutated}.
ExploreOutcome explore(const PolicySchedule& schedule, const SearchConfig& cfg, Rng& rng);

/// One (trial, generation) outcome, with the model kept so past trials can
/// serve as teachers.
struct TrialRecord {
  int trial_id = 0;
  int generation = 0;
  double objective = 0.0;
  bool failed = false;
  PolicySchedule schedule;
  ModelHandle model;
  /// Pseudo-database generation visible while this trial trained.
  int db_generation = -1;
};

struct TeacherMember {
  int trial_id = 0;
  int generation = 0;
  double objective = 0.0;
  ModelHandle model;
};

struct TeacherEnsemble {
  std::vector<TeacherMember> members;
  double nms_iou = 0.5;

  bool empty() const { return members.empty(); }
};

/// Best teacher_count non-failed records with objective >= teacher_min_ap
/// among generations before `current_generation` (only the one just before
/// it when configured). Ties go to the later generation, then the lower
/// trial_id. Clones sharing a model are kept as separate members.
TeacherEnsemble select_teachers(std::span<const TrialRecord> history, int current_generation,
                                const SearchConfig& cfg);

/// Maps a model and a frame to scored boxes. Implementations must be safe to
/// call concurrently and should throw DetectorFailure on error.
class Detector {
 public:
  virtual ~Detector() = default;
  virtual std::vector<LabeledBox> detect(const ModelHandle& model, int trial_id, const Scene& frame) const = 0;
};

/// Class-aware greedy NMS: boxes are visited in descending score (stable) and
/// one is dropped when it reaches BEV IoU >= `nms_iou` with an already kept
/// box of the same class. Kept boxes scoring below `min_score` are then
/// removed. Output boxes are marked pseudo, in descending score.
std::vector<LabeledBox> fuse_detections(std::span<const LabeledBox> pooled, double nms_iou, double min_score);

/// Pools every teacher's detections on `frame` and fuses them. A teacher
/// whose detector throws DetectorFailure is skipped; if every teacher fails
/// the last failure is rethrown.
Scene ensemble_pseudo_label(const Scene& frame, const TeacherEnsemble& teachers, const Detector& detector,
                            double min_score = 0.0);

struct TrainingContext {
  int generation = 0;
  std::int64_t step_begin = 0;
  std::int64_t steps = 0;
  std::uint64_t seed = 0;
  std::shared_ptr<const PseudoDatabase> db;
  std::span<const Scene> labeled;
  MixConfig mix;
};

/// Advances a trial's model by ctx.steps. Called concurrently for distinct
/// trials. May throw TrainerFailure.
class Trainer {
 public:
  virtual ~Trainer() = default;
  virtual ModelHandle train(const TrialState& trial, const TrainingContext& ctx) const = 0;
};

/// Objective in [0, 1] for a freshly trained model. Called concurrently.
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual double evaluate(const TrialState& trial, const ModelHandle& model, int generation) const = 0;
};

struct TeacherLogEntry {
  int generation = 0;  // generation about to train with the refreshed db
  std::vector<TeacherMember> teachers;
  bool refreshed = false;
  int db_generation = -1;
  std::size_t pseudo_frames = 0;
  std::size_t pseudo_boxes = 0;
};

struct SearchReport {
  SearchConfig config;
  std::uint64_t seed = 0;
  std::size_t generations = 0;
  /// population_size records per generation, in (generation, trial_id) order.
  std::vector<TrialRecord> records;
  std::vector<TeacherLogEntry> teacher_log;
  std::vector<double> best_per_generation;
  std::vector<CloneEvent> clones;
  /// Distillation boundaries passed (ceil(N/K) - 1) and actual db swaps.
  std::size_t distillation_rounds = 0;
  std::size_t db_refreshes = 0;
  std::size_t explore_calls = 0;
  std::size_t explore_mutations = 0;
  TrialRecord best;
};

struct SearchInputs {
  std::span<const Scene> labeled;
  std::span<const Scene> unlabeled;
  /// Database visible to generation 0. May be empty.
  PseudoDatabase initial_db;
};

/// The generation loop. Before every generation but the first: select
/// teachers, pseudo-label the unlabeled set and publish a new database
/// generation (skipped when no teacher qualifies), then exploit and explore.
/// Every trial then trains for one generation step and is evaluated. A trial
/// whose trainer throws TrainerFailure scores 0 for that generation.
SearchReport run_search(const SearchConfig& cfg, const Trainer& trainer, const Evaluator& evaluator,
                        const Detector& detector, const SearchInputs& inputs, std::uint64_t seed);

/// One JSON object per line: trial_id, generation, objective, failed,
/// db_generation, schedule (flat vector).
std::string report_lines(const SearchReport& report);

/// Config, seed, teacher log, clone log and best schedule.
nlohmann::ordered_json report_manifest(const SearchReport& report);

}  // namespace pseudoaug
