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

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pseudoaug/scene.hpp"

namespace pseudoaug {

// PAF1 frame layout, all integers and floats little-endian:
//
//   magic "PAF1"            4 bytes
//   version                 u32 (= kFrameVersion)
//   frame_id length         u32, then UTF-8 bytes
//   point count             u32
//   box count               u32
//   points                  count x f32 (x, y, z, intensity)
//   boxes                   count x { f32 (cx, cy, cz, l, w, h, heading, score), u8 class, u8 provenance }
//
// Coordinates are held as float64 in memory and narrowed to float32 on write.

inline constexpr std::array<char, 4> kFrameMagic{'P', 'A', 'F', '1'};
inline constexpr std::uint32_t kFrameVersion = 1;
inline constexpr std::size_t kPointRecordBytes = 16;
inline constexpr std::size_t kBoxRecordBytes = 34;
inline constexpr std::string_view kFrameExtension = ".paf";

std::vector<std::uint8_t> encode_frame(const Scene& scene);

/// Writes the PAF1 encoding of `scene`; returns the number of bytes written.
/// Throws FormatError(io_failure) when the sink reports a failure.
std::size_t write_frame(const Scene& scene, std::ostream& sink);

/// Inverse of encode_frame. The frame-level provenance is not stored; it is
/// recovered from the boxes: all-pseudo -> pseudo, mixed -> fused,
/// otherwise labeled.
Scene decode_frame(std::span<const std::uint8_t> bytes);
Scene read_frame(std::istream& source);

void save_frame(const Scene& scene, const std::filesystem::path& path);
Scene load_frame(const std::filesystem::path& path);

/// Reads only the header and returns the frame id.
std::string peek_frame_id(const std::filesystem::path& path);

/// Rectified-camera <-> LiDAR extrinsics in the KITTI calib.txt convention.
struct KittiCalibration {
  std::array<double, 9> r0_rect{1, 0, 0, 0, 1, 0, 0, 0, 1};
  std::array<double, 12> velo_to_cam{1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0};
};

/// Parses the `R0_rect:` and `Tr_velo_to_cam:` lines of a KITTI calibration
/// file. Other lines are ignored.
KittiCalibration parse_kitti_calibration(std::string_view text);

/// The image-space fields of one KITTI label line, for callers that apply
/// the official difficulty buckets themselves.
struct KittiLabelFields {
  ObjectClass object_class = ObjectClass::vehicle;
  double truncation = 0.0;
  int occlusion = 0;
  double alpha = 0.0;
  std::array<double, 4> bbox_2d{};  // left, top, right, bottom in pixels
  std::optional<double> score;
};

/// One entry per label line that read_kitti_frame turns into a box, in the
/// same order. Throws the same FormatErrors.
std::vector<KittiLabelFields> read_kitti_label_fields(std::string_view label_text);

/// Converts a KITTI object label file and velodyne payload into a Scene.
/// Locations (bottom centers in rectified camera coordinates) are mapped to
/// LiDAR geometric centers through `calib`; rotation_y becomes a LiDAR
/// heading. 15-field lines are ground truth; a 16th field is read as a
/// detection score and marks the box as pseudo. DontCare lines are skipped.
Scene read_kitti_frame(std::string_view label_text, std::span<const std::uint8_t> point_payload,
                       const KittiCalibration& calib, std::string frame_id);

struct ManifestEntry {
  std::string frame_id;
  std::filesystem::path path;
};

struct DatasetManifest {
  std::filesystem::path root;
  std::string split;
  std::string labeled_fraction;  // e.g. "10pct"; empty when untagged
  std::vector<ManifestEntry> frames;
};

/// Manifest of every `*.paf` file directly inside `dir`, sorted by frame id.
/// Reads an optional LABELED_FRACTION file for the tag.
DatasetManifest scan_frames(const std::filesystem::path& dir);

/// scan_frames(root / split); throws FormatError(missing_split) when the
/// split directory does not exist.
DatasetManifest scan_dataset(const std::filesystem::path& root, std::string_view split);

/// Writes `db` as `root/gen_<k>/frames/*.paf` and then `root/gen_<k>/MANIFEST`
/// as the commit marker. Crops are rebuilt from the frames on load.
void save_pseudo_database(const PseudoDatabase& db, const std::filesystem::path& root);

/// Generations under `root` whose MANIFEST exists, ascending.
std::vector<int> list_committed_generations(const std::filesystem::path& root);

/// Loads the requested generation, or the latest committed one. Returns an
/// empty database (generation -1) when nothing is committed.
PseudoDatabase load_pseudo_database(const std::filesystem::path& root, std::optional<int> generation = std::nullopt);

}  // namespace pseudoaug
