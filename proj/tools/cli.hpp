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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pseudoaug::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitBadInput = 2;  // malformed input, usage error, refused overwrite
inline constexpr int kExitWriteFailure = 3;

struct AugmentOptions {
  std::filesystem::path in;
  std::filesystem::path pseudo_db;
  std::filesystem::path schedule;
  std::uint64_t seed = 0;
  std::filesystem::path out;
  std::optional<std::string> only;  // serialized policy name
  std::size_t workers = 1;
  bool force = false;
};

struct FuseOptions {
  std::vector<std::filesystem::path> detections;
  std::filesystem::path unlabeled;
  double nms_iou = 0.5;
  double min_score = 0.5;
  std::filesystem::path out_db;
  std::optional<int> generation;  // default: one past the latest committed
};

struct MetricsOptions {
  std::filesystem::path gt;
  std::filesystem::path pseudo;
  std::filesystem::path report;
  bool point_pr = false;
  bool ap = false;  // neither flag set means both
  double iou = 0.7;
  bool force = false;
};

struct SearchOptions {
  std::filesystem::path config;
  bool surrogate = false;
  std::uint64_t seed = 0;
  std::filesystem::path report;
  bool force = false;
};

int cmd_augment(const AugmentOptions& opts, std::ostream& out, std::ostream& err);
int cmd_fuse_teachers(const FuseOptions& opts, std::ostream& out, std::ostream& err);
int cmd_metrics(const MetricsOptions& opts, std::ostream& out, std::ostream& err);
int cmd_search(const SearchOptions& opts, std::ostream& out, std::ostream& err);

/// Parses argv (argv[0] is the program name) and dispatches.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pseudoaug::cli
