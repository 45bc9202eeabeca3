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

#include "pseudoaug/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "pseudoaug/error.hpp"

namespace pseudoaug {

namespace fs = std::filesystem;

namespace {

class ByteWriter {
 public:
  explicit ByteWriter(std::vector<std::uint8_t>& out) : out_(out) {}

  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int shift = 0; shift < 32; shift += 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }
  void f32(double v) { u32(std::bit_cast<std::uint32_t>(static_cast<float>(v))); }
  void bytes(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }

 private:
  std::vector<std::uint8_t>& out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

  void require(std::size_t n, const char* section) const {
    if (in_.size() - pos_ < n) {
      throw FormatError(FormatErrorKind::truncated_stream, section,
                        "needs " + std::to_string(n) + " bytes, " + std::to_string(in_.size() - pos_) +
                            " remain");
    }
  }
  std::uint8_t u8() { return in_[pos_++]; }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in_[pos_++]) << (8 * i);
    return v;
  }
  double f32() { return static_cast<double>(std::bit_cast<float>(u32())); }
  std::string str(std::size_t n) {
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

SceneSource infer_source(const std::vector<LabeledBox>& boxes) {
  std::size_t pseudo = 0;
  for (const LabeledBox& b : boxes) pseudo += b.source == BoxSource::pseudo ? 1 : 0;
  if (pseudo == 0) return SceneSource::labeled;
  return pseudo == boxes.size() ? SceneSource::pseudo : SceneSource::fused;
}

struct Header {
  std::string frame_id;
  std::uint32_t point_count = 0;
  std::uint32_t box_count = 0;
};

constexpr std::size_t kFixedHeaderBytes = 8;  // magic + version

void check_magic_and_version(ByteReader& r) {
  r.require(4, "magic");
  const std::string magic = r.str(4);
  if (magic != std::string_view(kFrameMagic.data(), kFrameMagic.size())) {
    throw FormatError(FormatErrorKind::bad_magic, "magic", "expected PAF1");
  }
  r.require(4, "version");
  const std::uint32_t version = r.u32();
  if (version != kFrameVersion) {
    throw FormatError(FormatErrorKind::unsupported_version, "version",
                      "unsupported version " + std::to_string(version));
  }
}

Header read_header_tail(ByteReader& r) {
  Header h;
  r.require(4, "frame_id length");
  const std::uint32_t id_len = r.u32();
  r.require(id_len, "frame_id");
  h.frame_id = r.str(id_len);
  r.require(4, "point count");
  h.point_count = r.u32();
  r.require(4, "box count");
  h.box_count = r.u32();
  return h;
}

Scene read_body(ByteReader& r, Header h) {
  Scene scene;
  scene.frame_id = std::move(h.frame_id);
  r.require(static_cast<std::size_t>(h.point_count) * kPointRecordBytes, "points");
  scene.points.resize(h.point_count);
  for (Point& p : scene.points) {
    p.x = r.f32();
    p.y = r.f32();
    p.z = r.f32();
    p.intensity = r.f32();
  }
  r.require(static_cast<std::size_t>(h.box_count) * kBoxRecordBytes, "boxes");
  scene.boxes.resize(h.box_count);
  for (LabeledBox& b : scene.boxes) {
    b.geometry.cx = r.f32();
    b.geometry.cy = r.f32();
    b.geometry.cz = r.f32();
    b.geometry.length = r.f32();
    b.geometry.width = r.f32();
    b.geometry.height = r.f32();
    b.geometry.heading = r.f32();
    b.score = r.f32();
    const std::uint8_t cls = r.u8();
    const std::uint8_t src = r.u8();
    if (cls >= kObjectClassCount) {
      throw FormatError(FormatErrorKind::invalid_value, "boxes", "unknown class code " + std::to_string(cls));
    }
    if (src > 1) {
      throw FormatError(FormatErrorKind::invalid_value, "boxes", "unknown provenance code " + std::to_string(src));
    }
    b.object_class = static_cast<ObjectClass>(cls);
    b.source = static_cast<BoxSource>(src);
  }
  scene.source = infer_source(scene.boxes);
  return scene;
}

void read_exact(std::istream& in, std::vector<std::uint8_t>& buf, std::size_t n) {
  const std::size_t old = buf.size();
  buf.resize(old + n);
  in.read(reinterpret_cast<char*>(buf.data() + old), static_cast<std::streamsize>(n));
  buf.resize(old + static_cast<std::size_t>(in.gcount()));
}

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(FormatErrorKind::io_failure, path.string(), "cannot open for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool parse_double(std::string_view text, double& out) {
  // std::from_chars for double is available in libstdc++ 11.
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

using Mat3 = std::array<double, 9>;
using Vec3 = std::array<double, 3>;

Mat3 inverse3(const Mat3& m, const char* section) {
  const double a = m[0], b = m[1], c = m[2], d = m[3], e = m[4], f = m[5], g = m[6], h = m[7], i = m[8];
  const double det = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
  if (std::abs(det) < 1e-12) throw FormatError(FormatErrorKind::bad_calibration, section, "singular matrix");
  const double s = 1.0 / det;
  return {(e * i - f * h) * s, (c * h - b * i) * s, (b * f - c * e) * s,
          (f * g - d * i) * s, (a * i - c * g) * s, (c * d - a * f) * s,
          (d * h - e * g) * s, (b * g - a * h) * s, (a * e - b * d) * s};
}

Vec3 mul(const Mat3& m, const Vec3& v) {
  return {m[0] * v[0] + m[1] * v[1] + m[2] * v[2], m[3] * v[0] + m[4] * v[1] + m[5] * v[2],
          m[6] * v[0] + m[7] * v[1] + m[8] * v[2]};
}

std::optional<ObjectClass> kitti_class(std::string_view type) {
  if (type == "Car" || type == "Van" || type == "Truck") return ObjectClass::vehicle;
  if (type == "Pedestrian" || type == "Person_sitting") return ObjectClass::pedestrian;
  if (type == "Cyclist") return ObjectClass::cyclist;
  if (type == "DontCare") return std::nullopt;
  return ObjectClass::other;
}

}  // namespace

std::vector<std::uint8_t> encode_frame(const Scene& scene) {
  std::vector<std::uint8_t> out;
  out.reserve(kFixedHeaderBytes + 12 + scene.frame_id.size() + scene.points.size() * kPointRecordBytes +
              scene.boxes.size() * kBoxRecordBytes);
  ByteWriter w(out);
  w.bytes(std::string_view(kFrameMagic.data(), kFrameMagic.size()));
  w.u32(kFrameVersion);
  w.u32(static_cast<std::uint32_t>(scene.frame_id.size()));
  w.bytes(scene.frame_id);
  w.u32(static_cast<std::uint32_t>(scene.points.size()));
  w.u32(static_cast<std::uint32_t>(scene.boxes.size()));
  for (const Point& p : scene.points) {
    w.f32(p.x);
    w.f32(p.y);
    w.f32(p.z);
    w.f32(p.intensity);
  }
  for (const LabeledBox& b : scene.boxes) {
    w.f32(b.geometry.cx);
    w.f32(b.geometry.cy);
    w.f32(b.geometry.cz);
    w.f32(b.geometry.length);
    w.f32(b.geometry.width);
    w.f32(b.geometry.height);
    w.f32(b.geometry.heading);
    w.f32(b.score);
    w.u8(static_cast<std::uint8_t>(b.object_class));
    w.u8(static_cast<std::uint8_t>(b.source));
  }
  return out;
}

std::size_t write_frame(const Scene& scene, std::ostream& sink) {
  const std::vector<std::uint8_t> bytes = encode_frame(scene);
  sink.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!sink) throw FormatError(FormatErrorKind::io_failure, "sink", "write failed");
  return bytes.size();
}

Scene decode_frame(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  check_magic_and_version(r);
  Scene scene = read_body(r, read_header_tail(r));
  if (r.remaining() != 0) {
    throw FormatError(FormatErrorKind::invalid_value, "trailer",
                      std::to_string(r.remaining()) + " unexpected trailing bytes");
  }
  return scene;
}

Scene read_frame(std::istream& source) {
  // Pull the stream section by section so a concatenation of frames can be
  // read one at a time.
  std::vector<std::uint8_t> buf;
  read_exact(source, buf, kFixedHeaderBytes + 4);
  {
    ByteReader r(buf);
    check_magic_and_version(r);
    r.require(4, "frame_id length");
  }
  const std::uint32_t id_len = ByteReader(std::span(buf).subspan(kFixedHeaderBytes)).u32();
  read_exact(source, buf, std::size_t{id_len} + 8);
  ByteReader counts(buf);
  counts.str(kFixedHeaderBytes);
  const Header h = read_header_tail(counts);
  read_exact(source, buf,
             std::size_t{h.point_count} * kPointRecordBytes + std::size_t{h.box_count} * kBoxRecordBytes);
  ByteReader r(buf);
  check_magic_and_version(r);
  return read_body(r, read_header_tail(r));
}

void save_frame(const Scene& scene, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(FormatErrorKind::io_failure, path.string(), "cannot open for writing");
  write_frame(scene, out);
  out.close();
  if (!out) throw FormatError(FormatErrorKind::io_failure, path.string(), "write failed");
}

Scene load_frame(const fs::path& path) {
  try {
    return decode_frame(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(e.kind(), path.filename().string() + ":" + e.section(), e.what());
  }
}

std::string peek_frame_id(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(FormatErrorKind::io_failure, path.string(), "cannot open for reading");
  std::vector<std::uint8_t> buf;
  read_exact(in, buf, kFixedHeaderBytes + 4);
  ByteReader r(buf);
  check_magic_and_version(r);
  r.require(4, "frame_id length");
  const std::uint32_t id_len = r.u32();
  read_exact(in, buf, id_len);
  ByteReader full(buf);
  full.str(kFixedHeaderBytes + 4);
  full.require(id_len, "frame_id");
  return full.str(id_len);
}

KittiCalibration parse_kitti_calibration(std::string_view text) {
  KittiCalibration calib;
  bool have_r0 = false;
  bool have_tr = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    const auto fields = split_ws(text.substr(pos, end - pos));
    pos = end + 1;
    if (fields.empty()) continue;
    auto fill = [&](auto& dst, const char* name) {
      if (fields.size() != dst.size() + 1) {
        throw FormatError(FormatErrorKind::bad_calibration, name,
                          "expected " + std::to_string(dst.size()) + " values");
      }
      for (std::size_t i = 0; i < dst.size(); ++i) {
        if (!parse_double(fields[i + 1], dst[i])) {
          throw FormatError(FormatErrorKind::bad_calibration, name, "non-numeric value");
        }
      }
    };
    if (fields[0] == "R0_rect:") {
      fill(calib.r0_rect, "R0_rect");
      have_r0 = true;
    } else if (fields[0] == "Tr_velo_to_cam:") {
      fill(calib.velo_to_cam, "Tr_velo_to_cam");
      have_tr = true;
    }
  }
  if (!have_r0 || !have_tr) {
    throw FormatError(FormatErrorKind::bad_calibration, "calibration", "missing R0_rect or Tr_velo_to_cam");
  }
  return calib;
}

namespace {

// Calls `fn(class, v, has_score)` for every label line that maps to a box;
// v holds fields 2..16 (trunc occ alpha x1 y1 x2 y2 h w l x y z ry
// [score]) and has_score is set for 16-field lines.
template <typename Fn>
void for_each_kitti_label(std::string_view label_text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < label_text.size()) {
    const std::size_t end = std::min(label_text.find('\n', pos), label_text.size());
    const std::string_view line = label_text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const auto fields = split_ws(line);
    if (fields.empty()) continue;
    const std::string section = "label line " + std::to_string(line_no);
    if (fields.size() != 15 && fields.size() != 16) {
      throw FormatError(FormatErrorKind::malformed_label_line, section,
                        "expected 15 or 16 fields, got " + std::to_string(fields.size()));
    }
    const auto cls = kitti_class(fields[0]);
    if (!cls) continue;
    std::array<double, 15> v{};
    for (std::size_t i = 1; i < fields.size(); ++i) {
      if (!parse_double(fields[i], v[i - 1])) {
        throw FormatError(FormatErrorKind::malformed_label_line, section,
                          "field " + std::to_string(i + 1) + " is not a number");
      }
    }
    const double h = v[7], w = v[8], l = v[9];
    if (!(h > 0.0 && w > 0.0 && l > 0.0)) {
      throw FormatError(FormatErrorKind::malformed_label_line, section, "non-positive dimensions");
    }
    const bool has_score = fields.size() == 16;
    if (has_score && !(v[14] >= 0.0 && v[14] <= 1.0)) {
      throw FormatError(FormatErrorKind::malformed_label_line, section, "score outside [0, 1]");
    }
    fn(*cls, v, has_score);
  }
}

}  // namespace

std::vector<KittiLabelFields> read_kitti_label_fields(std::string_view label_text) {
  std::vector<KittiLabelFields> out;
  for_each_kitti_label(label_text, [&](ObjectClass cls, const std::array<double, 15>& v, bool has_score) {
    KittiLabelFields f;
    f.object_class = cls;
    f.truncation = v[0];
    f.occlusion = static_cast<int>(v[1]);
    f.alpha = v[2];
    f.bbox_2d = {v[3], v[4], v[5], v[6]};
    if (has_score) f.score = v[14];
    out.push_back(f);
  });
  return out;
}

Scene read_kitti_frame(std::string_view label_text, std::span<const std::uint8_t> point_payload,
                       const KittiCalibration& calib, std::string frame_id) {
  if (point_payload.size() % kPointRecordBytes != 0) {
    throw FormatError(FormatErrorKind::bad_point_payload, "points",
                      "payload of " + std::to_string(point_payload.size()) + " bytes is not a multiple of 16");
  }
  Scene scene;
  scene.frame_id = std::move(frame_id);
  ByteReader r(point_payload);
  scene.points.resize(point_payload.size() / kPointRecordBytes);
  for (Point& p : scene.points) {
    p.x = r.f32();
    p.y = r.f32();
    p.z = r.f32();
    p.intensity = r.f32();
  }

  const Mat3 rect_inv = inverse3(calib.r0_rect, "R0_rect");
  const Mat3 rot{calib.velo_to_cam[0], calib.velo_to_cam[1], calib.velo_to_cam[2],
                 calib.velo_to_cam[4], calib.velo_to_cam[5], calib.velo_to_cam[6],
                 calib.velo_to_cam[8], calib.velo_to_cam[9], calib.velo_to_cam[10]};
  const Vec3 trans{calib.velo_to_cam[3], calib.velo_to_cam[7], calib.velo_to_cam[11]};
  const Mat3 rot_inv = inverse3(rot, "Tr_velo_to_cam");
  auto rect_to_velo = [&](const Vec3& p) {
    const Vec3 cam = mul(rect_inv, p);
    return mul(rot_inv, Vec3{cam[0] - trans[0], cam[1] - trans[1], cam[2] - trans[2]});
  };
  auto rect_dir_to_velo = [&](const Vec3& d) { return mul(rot_inv, mul(rect_inv, d)); };

  for_each_kitti_label(label_text, [&](ObjectClass cls, const std::array<double, 15>& v, bool has_score) {
    const double h = v[7], w = v[8], l = v[9];
    const Vec3 bottom = rect_to_velo({v[10], v[11], v[12]});
    const double ry = v[13];
    const Vec3 forward = rect_dir_to_velo({std::cos(ry), 0.0, -std::sin(ry)});

    LabeledBox box;
    box.object_class = cls;
    box.geometry = Box7{bottom[0], bottom[1], bottom[2] + 0.5 * h, l, w, h,
                        normalize_heading(std::atan2(forward[1], forward[0]))};
    if (has_score) {
      box.score = v[14];
      box.source = BoxSource::pseudo;
    }
    scene.boxes.push_back(box);
  });
  scene.source = infer_source(scene.boxes);
  return scene;
}

DatasetManifest scan_frames(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw FormatError(FormatErrorKind::missing_split, dir.string(), "directory does not exist");
  }
  DatasetManifest manifest;
  manifest.root = dir.parent_path();
  manifest.split = dir.filename().string();
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != kFrameExtension) continue;
    manifest.frames.push_back({peek_frame_id(entry.path()), entry.path()});
  }
  std::sort(manifest.frames.begin(), manifest.frames.end(), [](const ManifestEntry& a, const ManifestEntry& b) {
    return a.frame_id != b.frame_id ? a.frame_id < b.frame_id : a.path < b.path;
  });
  for (std::size_t i = 1; i < manifest.frames.size(); ++i) {
    if (manifest.frames[i].frame_id == manifest.frames[i - 1].frame_id) {
      throw FormatError(FormatErrorKind::duplicate_frame, manifest.frames[i].path.string(),
                        "frame_id '" + manifest.frames[i].frame_id + "' also in " +
                            manifest.frames[i - 1].path.filename().string());
    }
  }
  const fs::path tag = dir / "LABELED_FRACTION";
  if (fs::is_regular_file(tag)) {
    std::ifstream in(tag);
    std::getline(in, manifest.labeled_fraction);
  }
  return manifest;
}

DatasetManifest scan_dataset(const fs::path& root, std::string_view split) {
  DatasetManifest manifest = scan_frames(root / fs::path(split));
  manifest.root = root;
  manifest.split = std::string(split);
  return manifest;
}

namespace {

fs::path generation_dir(const fs::path& root, int generation) {
  return root / ("gen_" + std::to_string(generation));
}

}  // namespace

void save_pseudo_database(const PseudoDatabase& db, const fs::path& root) {
  if (db.generation < 0) throw Error("cannot persist a pseudo database without a generation");
  const fs::path dir = generation_dir(root, db.generation);
  if (fs::exists(dir / "MANIFEST")) {
    throw FormatError(FormatErrorKind::io_failure, dir.string(), "generation already committed");
  }
  std::error_code ec;
  fs::create_directories(dir / "frames", ec);
  if (ec) throw FormatError(FormatErrorKind::io_failure, dir.string(), ec.message());

  std::ostringstream manifest;
  manifest << "generation " << db.generation << "\n";
  manifest << "frames " << db.frames.size() << "\n";
  for (std::size_t i = 0; i < db.frames.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "%06zu.paf", i);
    save_frame(db.frames[i], dir / "frames" / name);
    manifest << name << " " << db.frames[i].frame_id << "\n";
  }
  const fs::path tmp = dir / "MANIFEST.tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << manifest.str();
    out.close();
    if (!out) throw FormatError(FormatErrorKind::io_failure, tmp.string(), "write failed");
  }
  fs::rename(tmp, dir / "MANIFEST", ec);
  if (ec) throw FormatError(FormatErrorKind::io_failure, dir.string(), ec.message());
}

std::vector<int> list_committed_generations(const fs::path& root) {
  std::vector<int> out;
  if (!fs::is_directory(root)) return out;
  for (const auto& entry : fs::directory_iterator(root)) {
    const std::string name = entry.path().filename().string();
    if (!entry.is_directory() || name.rfind("gen_", 0) != 0) continue;
    int gen = 0;
    const auto res = std::from_chars(name.data() + 4, name.data() + name.size(), gen);
    if (res.ec != std::errc() || res.ptr != name.data() + name.size()) continue;
    if (fs::is_regular_file(entry.path() / "MANIFEST")) out.push_back(gen);
  }
  std::sort(out.begin(), out.end());
  return out;
}

PseudoDatabase load_pseudo_database(const fs::path& root, std::optional<int> generation) {
  const std::vector<int> committed = list_committed_generations(root);
  if (!generation) {
    if (committed.empty()) return PseudoDatabase{};
    generation = committed.back();
  } else if (std::find(committed.begin(), committed.end(), *generation) == committed.end()) {
    throw FormatError(FormatErrorKind::io_failure, generation_dir(root, *generation).string(),
                      "generation not committed");
  }
  const fs::path dir = generation_dir(root, *generation);
  std::ifstream in(dir / "MANIFEST");
  std::string key;
  int gen = -1;
  std::size_t count = 0;
  if (!(in >> key >> gen) || key != "generation" || gen != *generation || !(in >> key >> count) ||
      key != "frames") {
    throw FormatError(FormatErrorKind::invalid_value, (dir / "MANIFEST").string(), "malformed header");
  }
  PseudoDatabaseBuilder builder(*generation);
  for (std::size_t i = 0; i < count; ++i) {
    std::string file, frame_id;
    if (!(in >> file >> frame_id)) {
      throw FormatError(FormatErrorKind::truncated_stream, (dir / "MANIFEST").string(), "missing frame entries");
    }
    Scene frame = load_frame(dir / "frames" / file);
    frame.source = SceneSource::pseudo;
    builder.add_frame(std::move(frame));
  }
  return std::move(builder).build();
}

}  // namespace pseudoaug
