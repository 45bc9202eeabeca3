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

#include "pseudoaug/pbt.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "pseudoaug/error.hpp"

namespace pseudoaug {

namespace {

void require(bool ok, const char* field, const char* detail) {
  if (!ok) throw ConfigError(field, detail);
}

// Runs fn(i) for i in [0, n) on up to `workers` threads; the first exception
// is rethrown after all threads have joined.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

template <typename T>
void read_field(const nlohmann::json& doc, const char* key, T& out) {
  const auto it = doc.find(key);
  if (it == doc.end()) return;
  if constexpr (std::is_same_v<T, bool>) {
    if (!it->is_boolean()) throw ConfigError(key, "expected a boolean");
  } else if constexpr (std::is_unsigned_v<T>) {
    if (!it->is_number_integer() || it->get<long long>() < 0) throw ConfigError(key, "expected a non-negative integer");
  } else if constexpr (std::is_integral_v<T>) {
    if (!it->is_number_integer()) throw ConfigError(key, "expected an integer");
  } else {
    if (!it->is_number()) throw ConfigError(key, "expected a number");
  }
  out = it->get<T>();
}

double latest_objective(const TrialState& t) {
  if (t.objectives.empty()) throw Error("trial " + std::to_string(t.trial_id) + " has no objective yet");
  return t.objectives.back();
}

}  // namespace

void SearchConfig::validate() const {
  require(total_steps > 0, "total_steps", "must be positive");
  require(generation_step > 0 && generation_step <= total_steps, "generation_step", "must lie in (0, total_steps]");
  require(population_size >= 2, "population_size", "must be at least 2");
  require(teacher_min_ap >= 0.0 && teacher_min_ap <= 1.0, "teacher_min_ap", "must lie in [0, 1]");
  require(explore_rate >= 0.0 && explore_rate <= 1.0, "explore_rate", "must lie in [0, 1]");
  require(max_policies_mutated >= 1 && max_policies_mutated <= kPolicyCount, "max_policies_mutated",
          "must lie in [1, 9]");
  require(truncation_fraction > 0.0 && truncation_fraction <= 0.5, "truncation_fraction", "must lie in (0, 0.5]");
  require(nms_iou > 0.0 && nms_iou < 1.0, "nms_iou", "must lie in (0, 1)");
  require(pseudo_min_score >= 0.0 && pseudo_min_score <= 1.0, "pseudo_min_score", "must lie in [0, 1]");
  mix.validate();
}

std::size_t SearchConfig::generation_count() const {
  return static_cast<std::size_t>((total_steps + generation_step - 1) / generation_step);
}

SearchConfig search_config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config", "expected a JSON object");
  static const char* const kKeys[] = {
      "total_steps",     "generation_step",   "population_size",
      "teacher_count",   "teacher_min_ap",    "explore_rate",
      "max_policies_mutated", "truncation_fraction", "teachers_previous_generation_only",
      "nms_iou",         "pseudo_min_score",  "labeled_weight",
      "pseudo_weight",   "batch_size",        "workers"};
  for (const auto& [key, value] : doc.items()) {
    if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys)) {
      throw ConfigError(key, "unknown field");
    }
  }
  SearchConfig cfg;
  read_field(doc, "total_steps", cfg.total_steps);
  read_field(doc, "generation_step", cfg.generation_step);
  read_field(doc, "population_size", cfg.population_size);
  read_field(doc, "teacher_count", cfg.teacher_count);
  read_field(doc, "teacher_min_ap", cfg.teacher_min_ap);
  read_field(doc, "explore_rate", cfg.explore_rate);
  read_field(doc, "max_policies_mutated", cfg.max_policies_mutated);
  read_field(doc, "truncation_fraction", cfg.truncation_fraction);
  read_field(doc, "teachers_previous_generation_only", cfg.teachers_previous_generation_only);
  read_field(doc, "nms_iou", cfg.nms_iou);
  read_field(doc, "pseudo_min_score", cfg.pseudo_min_score);
  read_field(doc, "labeled_weight", cfg.mix.labeled_weight);
  read_field(doc, "pseudo_weight", cfg.mix.pseudo_weight);
  read_field(doc, "batch_size", cfg.mix.batch_size);
  read_field(doc, "workers", cfg.workers);
  cfg.validate();
  return cfg;
}

nlohmann::ordered_json search_config_to_json(const SearchConfig& cfg) {
  nlohmann::ordered_json doc;
  doc["total_steps"] = cfg.total_steps;
  doc["generation_step"] = cfg.generation_step;
  doc["population_size"] = cfg.population_size;
  doc["teacher_count"] = cfg.teacher_count;
  doc["teacher_min_ap"] = cfg.teacher_min_ap;
  doc["explore_rate"] = cfg.explore_rate;
  doc["max_policies_mutated"] = cfg.max_policies_mutated;
  doc["truncation_fraction"] = cfg.truncation_fraction;
  doc["teachers_previous_generation_only"] = cfg.teachers_previous_generation_only;
  doc["nms_iou"] = cfg.nms_iou;
  doc["pseudo_min_score"] = cfg.pseudo_min_score;
  doc["labeled_weight"] = cfg.mix.labeled_weight;
  doc["pseudo_weight"] = cfg.mix.pseudo_weight;
  doc["batch_size"] = cfg.mix.batch_size;
  doc["workers"] = cfg.workers;
  return doc;
}

void resample_policy(PolicySchedule& schedule, PolicyId policy, Rng& rng) {
  std::vector<double> vec = encode_schedule(schedule);
  const auto dims = schedule_dimensions();
  const auto [first, last] = policy_dimension_range(policy);
  for (std::size_t i = first; i < last; ++i) {
    if (dims[i].integral) {
      vec[i] = static_cast<double>(std::uniform_int_distribution<long long>(
          static_cast<long long>(dims[i].min), static_cast<long long>(dims[i].max))(rng));
    } else {
      vec[i] = uniform(rng, dims[i].min, dims[i].max);
    }
  }
  schedule = decode_schedule(vec, schedule).schedule;
}

PolicySchedule sample_schedule(Rng& rng, const PolicySchedule& base) {
  PolicySchedule out = base;
  for (PolicyId id : kPolicyOrder) resample_policy(out, id, rng);
  return out;
}

std::vector<TrialState> init_population(const SearchConfig& cfg, Rng& rng) {
  std::vector<TrialState> population(cfg.population_size);
  for (std::size_t i = 0; i < population.size(); ++i) {
    population[i].trial_id = static_cast<int>(i);
    population[i].schedule = sample_schedule(rng);
  }
  return population;
}

std::vector<CloneEvent> exploit(std::vector<TrialState>& population, const SearchConfig& cfg, Rng& rng) {
  const std::size_t m = population.size();
  if (m < 2) return {};
  auto quota = static_cast<std::size_t>(std::ceil(cfg.truncation_fraction * static_cast<double>(m) - 1e-9));
  quota = std::clamp<std::size_t>(quota, 1, m / 2);

  std::vector<std::size_t> rank(m);
  std::iota(rank.begin(), rank.end(), std::size_t{0});
  std::vector<double> objective(m);
  for (std::size_t i = 0; i < m; ++i) objective[i] = latest_objective(population[i]);
  std::sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) {
    if (objective[a] != objective[b]) return objective[a] > objective[b];
    return population[a].trial_id < population[b].trial_id;
  });

  std::vector<CloneEvent> events;
  std::uniform_int_distribution<std::size_t> pick(0, quota - 1);
  for (std::size_t r = m; r-- > m - quota;) {
    const std::size_t recipient = rank[r];
    const std::size_t donor = rank[pick(rng)];
    if (!(objective[donor] > objective[recipient])) continue;
    population[recipient].schedule = population[donor].schedule;
    population[recipient].model = population[donor].model;
    events.push_back({population[recipient].trial_id, population[donor].trial_id, 0});
  }
  return events;
}

ExploreOutcome explore(const PolicySchedule& schedule, const SearchConfig& cfg, Rng& rng) {
  ExploreOutcome out{schedule, {}};
  if (!bernoulli(rng, cfg.explore_rate)) return out;
  const std::size_t k = std::uniform_int_distribution<std::size_t>(1, cfg.max_policies_mutated)(rng);
  std::array<PolicyId, kPolicyCount> order = kPolicyOrder;
  std::shuffle(order.begin(), order.end(), rng);
  out.mutated.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(out.mutated.begin(), out.mutated.end());
  for (PolicyId id : out.mutated) resample_policy(out.schedule, id, rng);
  return out;
}

TeacherEnsemble select_teachers(std::span<const TrialRecord> history, int current_generation,
                                const SearchConfig& cfg) {
  std::vector<const TrialRecord*> eligible;
  for (const TrialRecord& r : history) {
    if (r.generation >= current_generation || r.failed || r.objective < cfg.teacher_min_ap) continue;
    if (cfg.teachers_previous_generation_only && r.generation != current_generation - 1) continue;
    eligible.push_back(&r);
  }
  std::stable_sort(eligible.begin(), eligible.end(), [](const TrialRecord* a, const TrialRecord* b) {
    if (a->objective != b->objective) return a->objective > b->objective;
    if (a->generation != b->generation) return a->generation > b->generation;
    return a->trial_id < b->trial_id;
  });
  if (eligible.size() > cfg.teacher_count) eligible.resize(cfg.teacher_count);

  TeacherEnsemble ensemble;
  ensemble.nms_iou = cfg.nms_iou;
  for (const TrialRecord* r : eligible) ensemble.members.push_back({r->trial_id, r->generation, r->objective, r->model});
  return ensemble;
}

std::vector<LabeledBox> fuse_detections(std::span<const LabeledBox> pooled, double nms_iou, double min_score) {
  std::vector<std::size_t> order(pooled.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pooled[a].score > pooled[b].score; });

  std::vector<LabeledBox> kept;
  for (std::size_t i : order) {
    const LabeledBox& candidate = pooled[i];
    bool suppressed = false;
    for (const LabeledBox& k : kept) {
      if (k.object_class == candidate.object_class && bev_iou(k.geometry, candidate.geometry) >= nms_iou) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(candidate);
  }
  std::erase_if(kept, [&](const LabeledBox& b) { return b.score < min_score; });
  for (LabeledBox& b : kept) b.source = BoxSource::pseudo;
  return kept;
}

Scene ensemble_pseudo_label(const Scene& frame, const TeacherEnsemble& teachers, const Detector& detector,
                            double min_score) {
  if (teachers.empty()) throw Error("cannot pseudo-label " + frame.frame_id + " without teachers");
  std::vector<LabeledBox> pooled;
  std::exception_ptr last_failure;
  std::size_t answered = 0;
  for (const TeacherMember& t : teachers.members) {
    try {
      std::vector<LabeledBox> boxes = detector.detect(t.model, t.trial_id, frame);
      pooled.insert(pooled.end(), boxes.begin(), boxes.end());
      ++answered;
    } catch (const DetectorFailure&) {
      last_failure = std::current_exception();
    }
  }
  if (answered == 0) std::rethrow_exception(last_failure);

  Scene out;
  out.frame_id = frame.frame_id;
  out.points = frame.points;
  out.boxes = fuse_detections(pooled, teachers.nms_iou, min_score);
  out.source = SceneSource::pseudo;
  return out;
}

SearchReport run_search(const SearchConfig& cfg, const Trainer& trainer, const Evaluator& evaluator,
                        const Detector& detector, const SearchInputs& inputs, std::uint64_t seed) {
  cfg.validate();
  const std::size_t generations = cfg.generation_count();
  const std::size_t m = cfg.population_size;

  SearchReport report;
  report.config = cfg;
  report.seed = seed;
  report.generations = generations;
  report.records.reserve(generations * m);

  Rng rng(splitmix64(seed));
  std::vector<TrialState> population = init_population(cfg, rng);

  PseudoDatabaseStore store;
  if (!inputs.initial_db.empty()) {
    PseudoDatabase initial = inputs.initial_db;
    initial.generation = std::max(initial.generation, 0);
    store.publish(std::move(initial));
  }

  bool have_best = false;
  for (std::size_t gi = 0; gi < generations; ++gi) {
    const int g = static_cast<int>(gi);

    if (g > 0) {
      ++report.distillation_rounds;
      TeacherLogEntry entry;
      entry.generation = g;
      const TeacherEnsemble ensemble = select_teachers(report.records, g, cfg);
      entry.teachers = ensemble.members;
      if (!ensemble.empty() && !inputs.unlabeled.empty()) {
        std::vector<Scene> labeled_frames(inputs.unlabeled.size());
        parallel_for(labeled_frames.size(), cfg.workers, [&](std::size_t i) {
          labeled_frames[i] = ensemble_pseudo_label(inputs.unlabeled[i], ensemble, detector, cfg.pseudo_min_score);
        });
        PseudoDatabaseBuilder builder(store.generation() + 1);
        for (Scene& f : labeled_frames) {
          entry.pseudo_boxes += f.boxes.size();
          extract_pseudo_assets(f, builder);
        }
        entry.pseudo_frames = builder.frame_count();
        store.publish(std::move(builder).build());
        entry.refreshed = true;
        ++report.db_refreshes;
      }
      entry.db_generation = store.generation();
      report.teacher_log.push_back(std::move(entry));

      for (CloneEvent& e : exploit(population, cfg, rng)) {
        e.generation = g;
        TrialState& trial = population[static_cast<std::size_t>(e.recipient)];
        ++report.explore_calls;
        ExploreOutcome outcome = explore(trial.schedule, cfg, rng);
        if (!outcome.mutated.empty()) ++report.explore_mutations;
        trial.schedule = std::move(outcome.schedule);
        report.clones.push_back(e);
      }
    }

    // Generation barrier: the snapshot is taken after any swap above and no
    // training starts before this point.
    const std::shared_ptr<const PseudoDatabase> db = store.snapshot();
    const std::int64_t step_begin = static_cast<std::int64_t>(gi) * cfg.generation_step;
    const std::int64_t steps = std::min(cfg.generation_step, cfg.total_steps - step_begin);

    std::vector<TrialRecord> outcome(m);
    parallel_for(m, cfg.workers, [&](std::size_t i) {
      const TrialState& trial = population[i];
      TrainingContext ctx;
      ctx.generation = g;
      ctx.step_begin = step_begin;
      ctx.steps = steps;
      ctx.seed = mix_seed(mix_seed(seed, static_cast<std::uint64_t>(trial.trial_id)), gi);
      ctx.db = db;
      ctx.labeled = inputs.labeled;
      ctx.mix = cfg.mix;

      TrialRecord& rec = outcome[i];
      rec.trial_id = trial.trial_id;
      rec.generation = g;
      rec.schedule = trial.schedule;
      rec.db_generation = db->generation;
      try {
        rec.model = trainer.train(trial, ctx);
      } catch (const TrainerFailure&) {
        rec.failed = true;
        rec.model = trial.model;
        rec.objective = 0.0;
        return;
      }
      const double value = evaluator.evaluate(trial, rec.model, g);
      rec.objective = std::isfinite(value) ? std::clamp(value, 0.0, 1.0) : 0.0;
    });

    double best = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      TrialState& trial = population[i];
      trial.model = outcome[i].model;
      trial.failed = outcome[i].failed;
      trial.objectives.push_back(outcome[i].objective);
      best = std::max(best, outcome[i].objective);
      if (!have_best || outcome[i].objective > report.best.objective) {
        report.best = outcome[i];
        have_best = true;
      }
      report.records.push_back(std::move(outcome[i]));
    }
    report.best_per_generation.push_back(best);
  }
  return report;
}

std::string report_lines(const SearchReport& report) {
  std::ostringstream out;
  for (const TrialRecord& r : report.records) {
    nlohmann::ordered_json line;
    line["trial_id"] = r.trial_id;
    line["generation"] = r.generation;
    line["objective"] = r.objective;
    line["failed"] = r.failed;
    line["db_generation"] = r.db_generation;
    line["schedule"] = encode_schedule(r.schedule);
    out << line.dump() << '\n';
  }
  return out.str();
}

nlohmann::ordered_json report_manifest(const SearchReport& report) {
  nlohmann::ordered_json doc;
  doc["config"] = search_config_to_json(report.config);
  doc["seed"] = report.seed;
  doc["generations"] = report.generations;
  doc["records"] = report.records.size();
  doc["distillation_rounds"] = report.distillation_rounds;
  doc["db_refreshes"] = report.db_refreshes;
  doc["explore_calls"] = report.explore_calls;
  doc["explore_mutations"] = report.explore_mutations;
  doc["best_per_generation"] = report.best_per_generation;
  // Clones share one model; they stay separate teacher entries.
  doc["teacher_pool_deduplicated"] = false;

  nlohmann::ordered_json log = nlohmann::ordered_json::array();
  for (const TeacherLogEntry& e : report.teacher_log) {
    nlohmann::ordered_json entry;
    entry["generation"] = e.generation;
    entry["refreshed"] = e.refreshed;
    entry["db_generation"] = e.db_generation;
    entry["pseudo_frames"] = e.pseudo_frames;
    entry["pseudo_boxes"] = e.pseudo_boxes;
    nlohmann::ordered_json teachers = nlohmann::ordered_json::array();
    for (const TeacherMember& t : e.teachers) {
      teachers.push_back({{"trial_id", t.trial_id}, {"generation", t.generation}, {"objective", t.objective}});
    }
    entry["teachers"] = std::move(teachers);
    log.push_back(std::move(entry));
  }
  doc["teacher_log"] = std::move(log);

  nlohmann::ordered_json clones = nlohmann::ordered_json::array();
  for (const CloneEvent& c : report.clones) {
    clones.push_back({{"generation", c.generation}, {"recipient", c.recipient}, {"donor", c.donor}});
  }
  doc["clones"] = std::move(clones);

  nlohmann::ordered_json best;
  best["trial_id"] = report.best.trial_id;
  best["generation"] = report.best.generation;
  best["objective"] = report.best.objective;
  best["schedule"] = schedule_to_json(report.best.schedule);
  doc["best"] = std::move(best);
  return doc;
}

}  // namespace pseudoaug
