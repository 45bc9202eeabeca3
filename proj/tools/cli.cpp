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

#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pseudoaug/error.hpp"
#include "pseudoaug/io.hpp"
#include "pseudoaug/metrics.hpp"
#include "pseudoaug/pbt.hpp"
#include "pseudoaug/pipeline.hpp"
#include "pseudoaug/surrogate.hpp"

namespace pseudoaug::cli {

namespace fs = std::filesystem;

namespace {

class WriteFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Fn>
int guarded(std::ostream& err, Fn&& body) {
  try {
    return body();
  } catch (const WriteFailure& e) {
    err << "error: " << e.what() << "\n";
    return kExitWriteFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(FormatErrorKind::io_failure, path.string(), "cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw WriteFailure(path.string() + ": cannot open for writing");
  out << text;
  out.close();
  if (!out) throw WriteFailure(path.string() + ": write failed");
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw WriteFailure(dir.string() + ": cannot create directory");
}

void require_directory(const fs::path& dir, const char* flag) {
  if (!fs::is_directory(dir)) throw ConfigError(flag, dir.string() + " is not a directory");
}

void refuse_existing_file(const fs::path& path, bool force, const char* flag) {
  if (fs::exists(path) && !force) throw ConfigError(flag, path.string() + " exists; pass --force to overwrite");
}

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

std::vector<Scene> load_frames(const DatasetManifest& manifest) {
  std::vector<Scene> frames;
  frames.reserve(manifest.frames.size());
  for (const ManifestEntry& e : manifest.frames) frames.push_back(load_frame(e.path));
  return frames;
}

// Teacher backed by a detection file.
struct FileTeacher : Model {
  std::map<std::string, std::vector<LabeledBox>> boxes;
};

class FileDetector : public Detector {
 public:
  std::vector<LabeledBox> detect(const ModelHandle& model, int trial_id, const Scene& frame) const override {
    const auto* teacher = dynamic_cast<const FileTeacher*>(model.get());
    if (teacher == nullptr) throw DetectorFailure(trial_id, "not a detection file");
    const auto it = teacher->boxes.find(frame.frame_id);
    return it == teacher->boxes.end() ? std::vector<LabeledBox>{} : it->second;
  }
};

FileTeacher parse_detection_file(const fs::path& path) {
  std::istringstream in(read_text(path));
  FileTeacher teacher;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string section = path.string() + ":" + std::to_string(line_no);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string frame_id, cls_name, extra;
    LabeledBox box;
    Box7& g = box.geometry;
    if (!(fields >> frame_id >> cls_name >> box.score >> g.cx >> g.cy >> g.cz >> g.length >> g.width >> g.height >>
          g.heading) ||
        (fields >> extra)) {
      throw FormatError(FormatErrorKind::malformed_label_line, section,
                        "expected `frame_id class score cx cy cz l w h heading`");
    }
    const auto cls = parse_object_class(cls_name);
    if (!cls) throw FormatError(FormatErrorKind::malformed_label_line, section, "unknown class " + cls_name);
    if (!(box.score >= 0.0 && box.score <= 1.0)) {
      throw FormatError(FormatErrorKind::invalid_value, section, "score outside [0, 1]");
    }
    g.heading = normalize_heading(g.heading);
    if (!is_valid(g)) throw FormatError(FormatErrorKind::invalid_value, section, "invalid box geometry");
    box.object_class = *cls;
    box.source = BoxSource::pseudo;
    teacher.boxes[frame_id].push_back(box);
  }
  return teacher;
}

constexpr ObjectClass kAllClasses[] = {ObjectClass::vehicle, ObjectClass::pedestrian, ObjectClass::cyclist,
                                       ObjectClass::other};

}  // namespace

int cmd_augment(const AugmentOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::optional<PolicyId> only;
    if (opts.only) {
      only = parse_policy_name(*opts.only);
      if (!only) throw ConfigError("--only", "unknown policy " + *opts.only);
    }
    const PolicySchedule schedule = schedule_from_json(nlohmann::json::parse(read_text(opts.schedule)));
    require_directory(opts.pseudo_db, "--pseudo-db");
    const PseudoDatabase db = load_pseudo_database(opts.pseudo_db);
    if (db.generation < 0) err << "warning: no committed generation in " << opts.pseudo_db.string() << "\n";
    const DatasetManifest manifest = scan_frames(opts.in);
    if (manifest.frames.empty()) err << "warning: no frames in " << opts.in.string() << "\n";

    if (fs::exists(opts.out) && !fs::is_directory(opts.out)) {
      throw ConfigError("--out", opts.out.string() + " is not a directory");
    }
    if (fs::is_directory(opts.out) && !fs::is_empty(opts.out) && !opts.force) {
      throw ConfigError("--out", opts.out.string() + " is not empty; pass --force to overwrite");
    }

    const std::vector<Scene> frames = load_frames(manifest);
    std::vector<Scene> results(frames.size());
    std::vector<PolicyCounts> counts(frames.size(), PolicyCounts{});
    parallel_for(frames.size(), opts.workers, [&](std::size_t i) {
      if (only) {
        Rng rng(derive_policy_seed(opts.seed, frames[i].frame_id, *only));
        results[i] = apply_policy(*only, frames[i], db, schedule, rng);
        if (!(results[i] == frames[i])) counts[i][static_cast<std::size_t>(*only)] = 1;
      } else {
        results[i] = apply_schedule(frames[i], db, schedule, opts.seed, &counts[i]);
      }
    });

    PolicyCounts total{};
    for (const PolicyCounts& c : counts) {
      for (std::size_t k = 0; k < kPolicyCount; ++k) total[k] += c[k];
    }

    nlohmann::ordered_json doc;
    doc["command"] = "augment";
    doc["input"] = opts.in.string();
    doc["pseudo_db"] = opts.pseudo_db.string();
    doc["pseudo_db_generation"] = db.generation;
    doc["seed"] = opts.seed;
    doc["only"] = only ? nlohmann::ordered_json(std::string(policy_name(*only))) : nlohmann::ordered_json(nullptr);
    doc["schedule"] = schedule_to_json(schedule);
    doc["frames"] = frames.size();
    nlohmann::ordered_json applied = nlohmann::ordered_json::object();
    for (std::size_t k = 0; k < kPolicyCount; ++k) {
      if (only && kPolicyOrder[k] != *only) continue;
      applied[std::string(policy_name(kPolicyOrder[k]))] = total[k];
    }
    doc["policy_counts"] = std::move(applied);
    nlohmann::ordered_json outputs = nlohmann::ordered_json::array();

    ensure_directory(opts.out);
    if (opts.force) {
      for (const auto& entry : fs::directory_iterator(opts.out)) {
        const fs::path& p = entry.path();
        if (entry.is_regular_file() && (p.extension() == kFrameExtension || p.filename() == "MANIFEST.json")) {
          std::error_code ec;
          fs::remove(p, ec);
          if (ec) throw WriteFailure(p.string() + ": cannot remove");
        }
      }
    }
    for (std::size_t i = 0; i < results.size(); ++i) {
      const fs::path target = opts.out / manifest.frames[i].path.filename();
      try {
        save_frame(results[i], target);
      } catch (const FormatError& e) {
        throw WriteFailure(e.what());
      }
      outputs.push_back({{"frame_id", results[i].frame_id}, {"file", target.filename().string()}});
    }
    doc["outputs"] = std::move(outputs);
    write_text(opts.out / "MANIFEST.json", doc.dump(2) + "\n");

    out << "frames=" << frames.size() << "\n";
    for (const auto& [name, count] : doc["policy_counts"].items()) out << "applied." << name << "=" << count << "\n";
    return kExitOk;
  });
}

int cmd_fuse_teachers(const FuseOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!(opts.nms_iou > 0.0 && opts.nms_iou < 1.0)) throw ConfigError("--nms-iou", "must lie in (0, 1)");
    if (!(opts.min_score >= 0.0 && opts.min_score <= 1.0)) throw ConfigError("--min-score", "must lie in [0, 1]");
    if (opts.detections.empty()) throw ConfigError("--detections", "at least one file is required");

    const DatasetManifest manifest = scan_frames(opts.unlabeled);
    std::set<std::string> known;
    for (const ManifestEntry& e : manifest.frames) known.insert(e.frame_id);

    TeacherEnsemble ensemble;
    ensemble.nms_iou = opts.nms_iou;
    std::set<std::string> unknown;
    for (std::size_t i = 0; i < opts.detections.size(); ++i) {
      auto teacher = std::make_shared<FileTeacher>(parse_detection_file(opts.detections[i]));
      for (const auto& [frame_id, boxes] : teacher->boxes) {
        if (!known.count(frame_id)) unknown.insert(frame_id);
      }
      ensemble.members.push_back({static_cast<int>(i), 0, 1.0, teacher});
    }
    if (!unknown.empty()) {
      std::string list;
      for (const std::string& id : unknown) list += (list.empty() ? "" : " ") + id;
      throw FormatError(FormatErrorKind::invalid_value, "--detections", "unknown frame ids: " + list);
    }

    const std::vector<int> committed = list_committed_generations(opts.out_db);
    const int generation = opts.generation.value_or(committed.empty() ? 0 : committed.back() + 1);
    if (generation < 0) throw ConfigError("--generation", "must be non-negative");
    if (std::find(committed.begin(), committed.end(), generation) != committed.end()) {
      throw ConfigError("--out-db", "generation " + std::to_string(generation) + " is already committed");
    }

    const FileDetector detector;
    PseudoDatabaseBuilder builder(generation);
    std::size_t boxes = 0;
    for (const Scene& frame : load_frames(manifest)) {
      Scene labeled = ensemble_pseudo_label(frame, ensemble, detector, opts.min_score);
      boxes += labeled.boxes.size();
      extract_pseudo_assets(labeled, builder);
    }
    const std::size_t frame_count = builder.frame_count();
    const PseudoDatabase db = std::move(builder).build();
    try {
      ensure_directory(opts.out_db);
      save_pseudo_database(db, opts.out_db);
    } catch (const FormatError& e) {
      throw WriteFailure(e.what());
    }

    nlohmann::ordered_json doc;
    doc["command"] = "fuse-teachers";
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (const fs::path& p : opts.detections) files.push_back(p.string());
    doc["detections"] = std::move(files);
    doc["unlabeled"] = opts.unlabeled.string();
    doc["nms_iou"] = opts.nms_iou;
    doc["min_score"] = opts.min_score;
    doc["generation"] = generation;
    doc["frames"] = frame_count;
    doc["boxes"] = boxes;
    char gen_dir[32];
    std::snprintf(gen_dir, sizeof gen_dir, "gen_%d", generation);
    write_text(opts.out_db / gen_dir / "FUSE.json", doc.dump(2) + "\n");

    out << "generation=" << generation << "\nframes=" << frame_count << "\nboxes=" << boxes << "\n";
    return kExitOk;
  });
}

int cmd_metrics(const MetricsOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const bool want_pr = opts.point_pr || !opts.ap;
    const bool want_ap = opts.ap || !opts.point_pr;
    if (want_ap && !(opts.iou > 0.0 && opts.iou < 1.0)) throw ConfigError("--iou", "must lie in (0, 1)");
    refuse_existing_file(opts.report, opts.force, "--report");

    const DatasetManifest gt_manifest = scan_frames(opts.gt);
    const DatasetManifest pseudo_manifest = scan_frames(opts.pseudo);
    std::set<std::string> gt_ids, pseudo_ids;
    for (const ManifestEntry& e : gt_manifest.frames) gt_ids.insert(e.frame_id);
    for (const ManifestEntry& e : pseudo_manifest.frames) pseudo_ids.insert(e.frame_id);
    if (gt_ids != pseudo_ids) {
      for (const std::string& id : gt_ids) {
        if (!pseudo_ids.count(id)) err << "missing in --pseudo: " << id << "\n";
      }
      for (const std::string& id : pseudo_ids) {
        if (!gt_ids.count(id)) err << "missing in --gt: " << id << "\n";
      }
      throw FormatError(FormatErrorKind::invalid_value, "frame sets", "--gt and --pseudo hold different frames");
    }

    std::map<std::string, PRResult> pr;
    pr["all"] = make_pr(0, 0, 0);
    for (ObjectClass c : kAllClasses) pr[std::string(to_string(c))] = make_pr(0, 0, 0);
    ClassApAccumulator per_class(want_ap ? opts.iou : 0.5);
    ApAccumulator pooled(want_ap ? opts.iou : 0.5);

    for (std::size_t i = 0; i < gt_manifest.frames.size(); ++i) {
      const Scene gt = load_frame(gt_manifest.frames[i].path);
      const Scene pseudo = load_frame(pseudo_manifest.frames[i].path);
      if (want_pr) {
        pr["all"] += point_precision_recall(gt.points, gt.boxes, pseudo.boxes, std::nullopt);
        for (ObjectClass c : kAllClasses) {
          pr[std::string(to_string(c))] += point_precision_recall(gt.points, gt.boxes, pseudo.boxes, c);
        }
      }
      if (want_ap) {
        const std::vector<Detection> dets = to_detections(pseudo.boxes);
        const std::vector<GroundTruth> gts = to_ground_truth(gt.boxes);
        per_class.add_frame(dets, gts);
        pooled.add_frame(dets, gts);
      }
    }

    std::ostringstream csv;
    std::ostringstream kv;
    csv << "metric,class,value\n";
    kv << "frames=" << gt_manifest.frames.size() << "\n";
    auto emit = [&](const std::string& metric, const std::string& cls, const std::string& value) {
      csv << metric << "," << cls << "," << value << "\n";
      kv << metric << "." << cls << "=" << value << "\n";
    };
    if (want_pr) {
      std::vector<std::string> order{"all"};
      for (ObjectClass c : kAllClasses) order.emplace_back(to_string(c));
      for (const std::string& cls : order) {
        const PRResult& r = pr[cls];
        emit("point_tp", cls, std::to_string(r.true_positives));
        emit("point_fp", cls, std::to_string(r.false_positives));
        emit("point_fn", cls, std::to_string(r.false_negatives));
        emit("point_precision", cls, fmt(r.precision));
        emit("point_recall", cls, fmt(r.recall));
      }
    }
    if (want_ap) {
      emit("ap", "all", fmt(pooled.ap()));
      for (const auto& [cls, value] : per_class.ap()) emit("ap", std::string(to_string(cls)), fmt(value));
    }
    if (!opts.report.parent_path().empty()) ensure_directory(opts.report.parent_path());
    write_text(opts.report, csv.str());
    out << kv.str();
    return kExitOk;
  });
}

int cmd_search(const SearchOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!opts.surrogate) throw ConfigError("--surrogate", "only the surrogate backend is available; pass --surrogate");
    nlohmann::json doc = nlohmann::json::parse(read_text(opts.config));
    if (!doc.is_object()) throw ConfigError("config", "expected a JSON object");

    nlohmann::json surrogate = nlohmann::json::object();
    if (doc.contains("surrogate")) {
      surrogate = doc["surrogate"];
      doc.erase("surrogate");
      if (!surrogate.is_object()) throw ConfigError("surrogate", "expected an object");
    }
    const SearchConfig cfg = search_config_from_json(doc);

    double bandwidth = 0.6, drift = 0.02, noise = 0.01, period = 20.0;
    std::size_t labeled = 4, unlabeled = 4, augment_batches = 1;
    std::uint64_t spec_seed = opts.seed;
    for (const auto& [key, value] : surrogate.items()) {
      const std::string field = "surrogate." + key;
      auto number = [&](double lo, double hi) {
        if (!value.is_number()) throw ConfigError(field, "expected a number");
        const double v = value.get<double>();
        if (!(v >= lo && v <= hi)) throw ConfigError(field, "outside [" + fmt(lo) + ", " + fmt(hi) + "]");
        return v;
      };
      auto count = [&](std::size_t hi) {
        if (!value.is_number_unsigned() || value.get<std::uint64_t>() > hi) {
          throw ConfigError(field, "expected an integer in [0, " + std::to_string(hi) + "]");
        }
        return static_cast<std::size_t>(value.get<std::uint64_t>());
      };
      if (key == "bandwidth") bandwidth = number(1e-3, 10.0);
      else if (key == "drift_amplitude") drift = number(0.0, 1.0);
      else if (key == "drift_period") period = number(1e-3, 1e6);
      else if (key == "noise") noise = number(0.0, 0.01);
      else if (key == "labeled_frames") labeled = count(10000);
      else if (key == "unlabeled_frames") unlabeled = count(10000);
      else if (key == "augment_batches") augment_batches = count(1000);
      else if (key == "spec_seed") {
        if (!value.is_number_unsigned()) throw ConfigError(field, "expected an unsigned integer");
        spec_seed = value.get<std::uint64_t>();
      } else {
        throw ConfigError(field, "unknown field");
      }
    }
    refuse_existing_file(opts.report, opts.force, "--report");
    fs::path manifest_path = opts.report;
    manifest_path += ".manifest.json";
    refuse_existing_file(manifest_path, opts.force, "--report");

    SurrogateSpec spec = SurrogateSpec::random(spec_seed, drift, noise);
    spec.bandwidth = bandwidth;
    spec.drift_period = period;
    const SurrogateWorld world = make_surrogate_world(labeled, unlabeled, opts.seed);
    const SurrogateTrainer trainer(spec, augment_batches);
    const SurrogateEvaluator evaluator;
    const SurrogateDetector detector(world.hidden_gt);
    SearchInputs inputs;
    inputs.labeled = world.labeled;
    inputs.unlabeled = world.unlabeled;

    const SearchReport report = run_search(cfg, trainer, evaluator, detector, inputs, opts.seed);

    nlohmann::ordered_json manifest = report_manifest(report);
    manifest["surrogate"] = {{"bandwidth", bandwidth},         {"drift_amplitude", drift},
                             {"drift_period", period},         {"noise", noise},
                             {"labeled_frames", labeled},      {"unlabeled_frames", unlabeled},
                             {"augment_batches", augment_batches}, {"spec_seed", spec_seed}};
    if (!opts.report.parent_path().empty()) ensure_directory(opts.report.parent_path());
    write_text(opts.report, report_lines(report));
    write_text(manifest_path, manifest.dump(2) + "\n");

    out << "generations=" << report.generations << "\nrecords=" << report.records.size()
        << "\nbest_objective=" << fmt(report.best.objective) << "\nbest_trial=" << report.best.trial_id
        << "\nbest_generation=" << report.best.generation << "\n";
    return kExitOk;
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Point-cloud augmentation with pseudo labels", "pseudoaug"};
  app.require_subcommand(1);

  AugmentOptions aug;
  std::string aug_in, aug_db, aug_schedule, aug_out, aug_only;
  CLI::App* augment = app.add_subcommand("augment", "Augment every frame of a directory with a schedule");
  augment->add_option("--in", aug_in, "Directory of PAF1 frames")->required();
  augment->add_option("--pseudo-db", aug_db, "Pseudo-database root")->required();
  augment->add_option("--schedule", aug_schedule, "Schedule JSON file")->required();
  augment->add_option("--seed", aug.seed, "Seed")->required();
  augment->add_option("--out", aug_out, "Output directory")->required();
  augment->add_option("--only", aug_only, "Apply a single policy, e.g. PseudoFrame");
  augment->add_option("--workers", aug.workers, "Worker threads (0 = all cores)")->default_val(0);
  augment->add_flag("--force", aug.force, "Overwrite existing outputs");

  FuseOptions fuse;
  std::vector<std::string> fuse_dets;
  std::string fuse_unlabeled, fuse_out;
  int fuse_generation = -1;
  CLI::App* fuse_cmd = app.add_subcommand("fuse-teachers", "Fuse teacher detections into a pseudo-database generation");
  fuse_cmd->add_option("--detections", fuse_dets, "Detection files, one per teacher")->required()->expected(1, -1);
  fuse_cmd->add_option("--unlabeled", fuse_unlabeled, "Directory of unlabeled PAF1 frames")->required();
  fuse_cmd->add_option("--nms-iou", fuse.nms_iou, "NMS BEV IoU threshold")->default_val(0.5);
  fuse_cmd->add_option("--min-score", fuse.min_score, "Drop fused boxes below this score")->default_val(0.5);
  fuse_cmd->add_option("--out-db", fuse_out, "Pseudo-database root")->required();
  fuse_cmd->add_option("--generation", fuse_generation, "Generation to write (default: next)");

  MetricsOptions met;
  std::string met_gt, met_pseudo, met_report;
  CLI::App* metrics = app.add_subcommand("metrics", "Point-level precision/recall and AP");
  metrics->add_option("--gt", met_gt, "Ground-truth frames")->required();
  metrics->add_option("--pseudo", met_pseudo, "Pseudo-labeled frames")->required();
  metrics->add_option("--report", met_report, "CSV report path")->required();
  metrics->add_flag("--point-pr", met.point_pr, "Point-level precision/recall");
  metrics->add_flag("--ap", met.ap, "Per-class AP");
  metrics->add_option("--iou", met.iou, "AP matching BEV IoU")->default_val(0.7);
  metrics->add_flag("--force", met.force, "Overwrite an existing report");

  SearchOptions srch;
  std::string srch_config, srch_report;
  CLI::App* search = app.add_subcommand("search", "Population-based schedule search");
  search->add_option("--config", srch_config, "Search config JSON")->required();
  search->add_flag("--surrogate", srch.surrogate, "Use the surrogate trainer");
  search->add_option("--seed", srch.seed, "Seed")->required();
  search->add_option("--report", srch_report, "Line-delimited report path")->required();
  search->add_flag("--force", srch.force, "Overwrite an existing report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  if (augment->parsed()) {
    aug.in = aug_in;
    aug.pseudo_db = aug_db;
    aug.schedule = aug_schedule;
    aug.out = aug_out;
    if (augment->count("--only") > 0) aug.only = aug_only;
    return cmd_augment(aug, out, err);
  }
  if (fuse_cmd->parsed()) {
    for (const std::string& d : fuse_dets) fuse.detections.emplace_back(d);
    fuse.unlabeled = fuse_unlabeled;
    fuse.out_db = fuse_out;
    if (fuse_cmd->count("--generation") > 0) fuse.generation = fuse_generation;
    return cmd_fuse_teachers(fuse, out, err);
  }
  if (metrics->parsed()) {
    met.gt = met_gt;
    met.pseudo = met_pseudo;
    met.report = met_report;
    return cmd_metrics(met, out, err);
  }
  srch.config = srch_config;
  srch.report = srch_report;
  return cmd_search(srch, out, err);
}

}  // namespace pseudoaug::cli
