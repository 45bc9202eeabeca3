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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace pseudoaug {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rank-deficient or pathologically steep ground-plane regression.
class DegenerateFit : public Error {
 public:
  using Error::Error;
};

/// An operation that needs at least one point received none.
class EmptyScene : public Error {
 public:
  using Error::Error;
};

enum class FormatErrorKind {
  bad_magic,
  unsupported_version,
  truncated_stream,
  invalid_value,
  malformed_label_line,
  bad_point_payload,
  bad_calibration,
  missing_split,
  duplicate_frame,
  io_failure,
};

/// Failure while reading or writing one of the on-disk formats. `section()`
/// names the part of the stream or file that could not be processed.
class FormatError : public Error {
 public:
  FormatError(FormatErrorKind kind, std::string section, const std::string& detail)
      : Error(section + ": " + detail), kind_(kind), section_(std::move(section)) {}

  FormatErrorKind kind() const noexcept { return kind_; }
  const std::string& section() const noexcept { return section_; }

 private:
  FormatErrorKind kind_;
  std::string section_;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t actual)
      : Error("schedule vector has " + std::to_string(actual) + " components, expected " +
              std::to_string(expected)),
        expected_(expected),
        actual_(actual) {}

  std::size_t expected() const noexcept { return expected_; }
  std::size_t actual() const noexcept { return actual_; }

 private:
  std::size_t expected_;
  std::size_t actual_;
};

class BothStreamsEmpty : public Error {
 public:
  BothStreamsEmpty() : Error("cannot mix batches: labeled and pseudo streams are both empty") {}
};

/// Invalid configuration value; `field()` is the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& detail)
      : Error(field + ": " + detail), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class DetectorFailure : public Error {
 public:
  DetectorFailure(int trial_id, const std::string& detail)
      : Error("detector for trial " + std::to_string(trial_id) + " failed: " + detail),
        trial_id_(trial_id) {}

  int trial_id() const noexcept { return trial_id_; }

 private:
  int trial_id_;
};

class TrainerFailure : public Error {
 public:
  TrainerFailure(int trial_id, const std::string& detail)
      : Error("training trial " + std::to_string(trial_id) + " failed: " + detail),
        trial_id_(trial_id) {}

  int trial_id() const noexcept { return trial_id_; }

 private:
  int trial_id_;
};

}  // namespace pseudoaug
