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
#include <numbers>
#include <span>
#include <variant>
#include <vector>

namespace pseudoaug {

/// LiDAR return in the sensor frame (z up). Coordinates in meters, intensity
/// in [0, 1].
struct Point {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double intensity = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// 7-DOF box: geometric center, extents along the box axes and heading about
/// +z. `length` runs along the heading direction.
struct Box7 {
  double cx = 0.0;
  double cy = 0.0;
  double cz = 0.0;
  double length = 1.0;
  double width = 1.0;
  double height = 1.0;
  double heading = 0.0;

  double bottom_z() const { return cz - 0.5 * height; }

  friend bool operator==(const Box7&, const Box7&) = default;
};

/// Ground surface z = alpha * x + beta * y + gamma.
struct GroundPlane {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  double height_at(double x, double y) const { return alpha * x + beta * y + gamma; }

  friend bool operator==(const GroundPlane&, const GroundPlane&) = default;
};

inline constexpr int kNoBox = -1;
inline constexpr double kDefaultHistogramBin = 0.2;
/// Slopes steeper than 45 degrees are rejected as pathological fits.
inline constexpr double kMaxGroundSlope = 1.0;
/// BEV intersections at or below this area (m^2) count as touching, not
/// overlapping. Absorbs round-off from clipping boxes that share an edge.
inline constexpr double kOverlapAreaEpsilon = 1e-9;

/// Wraps an angle into (-pi, pi].
double normalize_heading(double angle);

bool is_finite(const Point& p);
/// Positive extents, finite fields and a normalized heading.
bool is_valid(const Box7& box);

/// Inclusive containment test in the box's canonical frame.
bool point_in_box(const Point& p, const Box7& box);

/// For each point, the index of the lowest-index box that contains it, or
/// kNoBox.
std::vector<int> assign_points_to_boxes(std::span<const Point> points, std::span<const Box7> boxes);

/// Corners of the BEV footprint, counter-clockwise.
std::array<std::array<double, 2>, 4> bev_corners(const Box7& box);

double bev_area(const Box7& box);

/// Area of intersection of the two heading-rotated BEV rectangles.
double bev_overlap(const Box7& a, const Box7& b);

/// Overlap predicate used when rejecting pasted objects.
bool bev_overlaps(const Box7& a, const Box7& b);

double bev_iou(const Box7& a, const Box7& b);

/// Least-squares plane through the bottom centers of `boxes`.
/// Throws DegenerateFit for fewer than 3 boxes, collinear bottom centers, or
/// slopes beyond kMaxGroundSlope.
GroundPlane fit_ground_plane_from_boxes(std::span<const Box7> boxes);

/// Horizontal plane at the center of the most populated z-bin. Bins are
/// centered on integer multiples of `bin_width`; ties go to the lower bin.
/// Throws EmptyScene when `points` is empty.
GroundPlane fit_ground_plane_from_histogram(std::span<const Point> points,
                                            double bin_width = kDefaultHistogramBin);

/// Full estimator used by the policies: box regression with >= 3 boxes,
/// horizontal plane at the mean bottom z when that regression is degenerate,
/// z-histogram with fewer than 3 boxes. A scene with neither boxes nor points
/// gets the plane z = 0.
GroundPlane estimate_ground_plane(std::span<const Box7> boxes, std::span<const Point> points,
                                  double bin_width = kDefaultHistogramBin);

struct RotateZ {
  double angle = 0.0;
};
struct Scale {
  double factor = 1.0;
};
struct Translate {
  double dx = 0.0;
  double dy = 0.0;
  double dz = 0.0;
};
struct FlipY {};

using SceneTransform = std::variant<RotateZ, Scale, Translate, FlipY>;

Point apply_transform(const SceneTransform& op, const Point& p);
Box7 apply_transform(const SceneTransform& op, const Box7& box);

/// Applies `op` in place to every point and box.
void transform_scene(std::span<Point> points, std::span<Box7> boxes, const SceneTransform& op);

/// Expresses a world point in the box's canonical frame (origin at the box
/// center, x along the heading).
Point to_box_frame(const Point& p, const Box7& box);
/// Inverse of to_box_frame.
Point from_box_frame(const Point& local, const Box7& box);

}  // namespace pseudoaug
