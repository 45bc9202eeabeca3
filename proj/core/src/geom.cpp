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

#include "pseudoaug/geom.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "pseudoaug/error.hpp"

namespace pseudoaug {

namespace {

using Vec2 = std::array<double, 2>;

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

double polygon_area(const std::vector<Vec2>& poly) {
  if (poly.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % poly.size()];
    twice += p[0] * q[1] - q[0] * p[1];
  }
  return 0.5 * std::abs(twice);
}

// Sutherland-Hodgman: clip `subject` against the half-plane left of e0->e1.
std::vector<Vec2> clip_against_edge(const std::vector<Vec2>& subject, const Vec2& e0, const Vec2& e1) {
  std::vector<Vec2> out;
  out.reserve(subject.size() + 2);
  for (std::size_t i = 0; i < subject.size(); ++i) {
    const Vec2& cur = subject[i];
    const Vec2& prev = subject[(i + subject.size() - 1) % subject.size()];
    const double d_cur = cross(e0, e1, cur);
    const double d_prev = cross(e0, e1, prev);
    if (d_cur >= 0.0) {
      if (d_prev < 0.0) {
        const double t = d_prev / (d_prev - d_cur);
        out.push_back({prev[0] + t * (cur[0] - prev[0]), prev[1] + t * (cur[1] - prev[1])});
      }
      out.push_back(cur);
    } else if (d_prev >= 0.0) {
      const double t = d_prev / (d_prev - d_cur);
      out.push_back({prev[0] + t * (cur[0] - prev[0]), prev[1] + t * (cur[1] - prev[1])});
    }
  }
  return out;
}

struct BoxFrame {
  double cx, cy, cz;
  double cos_h, sin_h;
  double half_l, half_w, half_h;
  double bev_radius;

  explicit BoxFrame(const Box7& b)
      : cx(b.cx),
        cy(b.cy),
        cz(b.cz),
        cos_h(std::cos(b.heading)),
        sin_h(std::sin(b.heading)),
        half_l(0.5 * b.length),
        half_w(0.5 * b.width),
        half_h(0.5 * b.height),
        bev_radius(std::hypot(half_l, half_w)) {}

  bool contains(const Point& p) const {
    const double dz = p.z - cz;
    if (std::abs(dz) > half_h) return false;
    const double dx = p.x - cx;
    const double dy = p.y - cy;
    const double lx = dx * cos_h + dy * sin_h;
    if (std::abs(lx) > half_l) return false;
    const double ly = -dx * sin_h + dy * cos_h;
    return std::abs(ly) <= half_w;
  }
};

}  // namespace

double normalize_heading(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

bool is_finite(const Point& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z) && std::isfinite(p.intensity);
}

bool is_valid(const Box7& b) {
  const bool finite = std::isfinite(b.cx) && std::isfinite(b.cy) && std::isfinite(b.cz) &&
                      std::isfinite(b.length) && std::isfinite(b.width) && std::isfinite(b.height) &&
                      std::isfinite(b.heading);
  return finite && b.length > 0.0 && b.width > 0.0 && b.height > 0.0 && b.heading > -std::numbers::pi &&
         b.heading <= std::numbers::pi;
}

bool point_in_box(const Point& p, const Box7& box) { return BoxFrame(box).contains(p); }

std::vector<int> assign_points_to_boxes(std::span<const Point> points, std::span<const Box7> boxes) {
  std::vector<BoxFrame> frames;
  frames.reserve(boxes.size());
  for (const Box7& b : boxes) frames.emplace_back(b);

  std::vector<int> assignment(points.size(), kNoBox);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point& p = points[i];
    for (std::size_t k = 0; k < frames.size(); ++k) {
      const BoxFrame& f = frames[k];
      if (std::abs(p.x - f.cx) > f.bev_radius || std::abs(p.y - f.cy) > f.bev_radius) continue;
      if (f.contains(p)) {
        assignment[i] = static_cast<int>(k);
        break;
      }
    }
  }
  return assignment;
}

std::array<std::array<double, 2>, 4> bev_corners(const Box7& box) {
  const double c = std::cos(box.heading);
  const double s = std::sin(box.heading);
  const double hl = 0.5 * box.length;
  const double hw = 0.5 * box.width;
  constexpr std::array<std::array<double, 2>, 4> signs{{{1, -1}, {1, 1}, {-1, 1}, {-1, -1}}};
  std::array<std::array<double, 2>, 4> corners{};
  for (std::size_t i = 0; i < 4; ++i) {
    const double lx = signs[i][0] * hl;
    const double ly = signs[i][1] * hw;
    corners[i] = {box.cx + lx * c - ly * s, box.cy + lx * s + ly * c};
  }
  return corners;
}

double bev_area(const Box7& box) { return box.length * box.width; }

double bev_overlap(const Box7& a, const Box7& b) {
  const double reach = std::hypot(a.length, a.width) * 0.5 + std::hypot(b.length, b.width) * 0.5;
  if (std::hypot(a.cx - b.cx, a.cy - b.cy) > reach) return 0.0;

  const auto ca = bev_corners(a);
  const auto cb = bev_corners(b);
  std::vector<Vec2> poly(ca.begin(), ca.end());
  for (std::size_t i = 0; i < 4 && !poly.empty(); ++i) {
    poly = clip_against_edge(poly, cb[i], cb[(i + 1) % 4]);
  }
  return polygon_area(poly);
}

bool bev_overlaps(const Box7& a, const Box7& b) { return bev_overlap(a, b) > kOverlapAreaEpsilon; }

double bev_iou(const Box7& a, const Box7& b) {
  const double inter = bev_overlap(a, b);
  const double uni = bev_area(a) + bev_area(b) - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

GroundPlane fit_ground_plane_from_boxes(std::span<const Box7> boxes) {
  if (boxes.size() < 3) {
    throw DegenerateFit("ground plane regression needs at least 3 boxes, got " +
                        std::to_string(boxes.size()));
  }
  const double n = static_cast<double>(boxes.size());
  double mx = 0.0, my = 0.0, mz = 0.0;
  for (const Box7& b : boxes) {
    mx += b.cx;
    my += b.cy;
    mz += b.bottom_z();
  }
  mx /= n;
  my /= n;
  mz /= n;

  // Centered normal equations for the slopes; gamma follows from the means.
  double sxx = 0.0, sxy = 0.0, syy = 0.0, sxz = 0.0, syz = 0.0;
  for (const Box7& b : boxes) {
    const double dx = b.cx - mx;
    const double dy = b.cy - my;
    const double dz = b.bottom_z() - mz;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
    sxz += dx * dz;
    syz += dy * dz;
  }
  const double det = sxx * syy - sxy * sxy;
  const double scale = std::max(1.0, (sxx + syy) * (sxx + syy));
  if (!(det > 1e-12 * scale)) {
    throw DegenerateFit("box bottom centers are collinear");
  }
  GroundPlane plane;
  plane.alpha = (sxz * syy - syz * sxy) / det;
  plane.beta = (syz * sxx - sxz * sxy) / det;
  plane.gamma = mz - plane.alpha * mx - plane.beta * my;
  if (std::abs(plane.alpha) > kMaxGroundSlope || std::abs(plane.beta) > kMaxGroundSlope) {
    throw DegenerateFit("fitted ground slope exceeds 45 degrees");
  }
  return plane;
}

GroundPlane fit_ground_plane_from_histogram(std::span<const Point> points, double bin_width) {
  if (points.empty()) throw EmptyScene("cannot build a z-histogram of an empty point cloud");
  if (!(bin_width > 0.0)) throw Error("histogram bin width must be positive");

  std::map<long long, std::size_t> bins;
  for (const Point& p : points) {
    ++bins[static_cast<long long>(std::floor(p.z / bin_width + 0.5))];
  }
  // std::map iterates ascending, so strict '>' keeps the lower bin on ties.
  auto best = bins.begin();
  for (auto it = bins.begin(); it != bins.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return GroundPlane{0.0, 0.0, static_cast<double>(best->first) * bin_width};
}

GroundPlane estimate_ground_plane(std::span<const Box7> boxes, std::span<const Point> points,
                                  double bin_width) {
  if (boxes.size() >= 3) {
    try {
      return fit_ground_plane_from_boxes(boxes);
    } catch (const DegenerateFit&) {
      double mean = 0.0;
      for (const Box7& b : boxes) mean += b.bottom_z();
      return GroundPlane{0.0, 0.0, mean / static_cast<double>(boxes.size())};
    }
  }
  if (!points.empty()) return fit_ground_plane_from_histogram(points, bin_width);
  if (!boxes.empty()) {
    double mean = 0.0;
    for (const Box7& b : boxes) mean += b.bottom_z();
    return GroundPlane{0.0, 0.0, mean / static_cast<double>(boxes.size())};
  }
  return GroundPlane{};
}

namespace {

struct PointVisitor {
  const Point& p;

  Point operator()(const RotateZ& op) const {
    const double c = std::cos(op.angle);
    const double s = std::sin(op.angle);
    return {p.x * c - p.y * s, p.x * s + p.y * c, p.z, p.intensity};
  }
  Point operator()(const Scale& op) const {
    return {p.x * op.factor, p.y * op.factor, p.z * op.factor, p.intensity};
  }
  Point operator()(const Translate& op) const { return {p.x + op.dx, p.y + op.dy, p.z + op.dz, p.intensity}; }
  Point operator()(const FlipY&) const { return {p.x, -p.y, p.z, p.intensity}; }
};

struct BoxVisitor {
  const Box7& b;

  Box7 operator()(const RotateZ& op) const {
    const Point c = PointVisitor{Point{b.cx, b.cy, b.cz, 0.0}}(op);
    Box7 out = b;
    out.cx = c.x;
    out.cy = c.y;
    out.heading = normalize_heading(b.heading + op.angle);
    return out;
  }
  Box7 operator()(const Scale& op) const {
    Box7 out = b;
    out.cx *= op.factor;
    out.cy *= op.factor;
    out.cz *= op.factor;
    out.length *= op.factor;
    out.width *= op.factor;
    out.height *= op.factor;
    return out;
  }
  Box7 operator()(const Translate& op) const {
    Box7 out = b;
    out.cx += op.dx;
    out.cy += op.dy;
    out.cz += op.dz;
    return out;
  }
  Box7 operator()(const FlipY&) const {
    Box7 out = b;
    out.cy = -b.cy;
    out.heading = normalize_heading(-b.heading);
    return out;
  }
};

}  // namespace

Point apply_transform(const SceneTransform& op, const Point& p) { return std::visit(PointVisitor{p}, op); }

Box7 apply_transform(const SceneTransform& op, const Box7& box) { return std::visit(BoxVisitor{box}, op); }

void transform_scene(std::span<Point> points, std::span<Box7> boxes, const SceneTransform& op) {
  for (Point& p : points) p = apply_transform(op, p);
  for (Box7& b : boxes) b = apply_transform(op, b);
}

Point to_box_frame(const Point& p, const Box7& box) {
  const double c = std::cos(box.heading);
  const double s = std::sin(box.heading);
  const double dx = p.x - box.cx;
  const double dy = p.y - box.cy;
  return {dx * c + dy * s, -dx * s + dy * c, p.z - box.cz, p.intensity};
}

Point from_box_frame(const Point& local, const Box7& box) {
  const double c = std::cos(box.heading);
  const double s = std::sin(box.heading);
  return {box.cx + local.x * c - local.y * s, box.cy + local.x * s + local.y * c, box.cz + local.z,
          local.intensity};
}

}  // namespace pseudoaug
