// Copyright 2026 The twollsh Authors
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

#include <Eigen/Core>

#include "twollsh/point_cloud.hpp"

namespace twollsh {

enum class BoxMode { OBB, AABB };

/// Bounding box plus the local reference frame (LRF) it defines. The LRF
/// origin is the box center and its axes are the columns of `rotation`.
struct ObbFrame {
  Point3 center = Point3::Zero();
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d half_extents = Eigen::Vector3d::Ones();

  double diagonal() const { return 2.0 * half_extents.norm(); }
  double volume() const { return 8.0 * half_extents.prod(); }
  // Corners in original coordinates, ordered by the quadrant bit pattern
  // used by the index (bit 0: -x, bit 1: -y, bit 2: -z).
  std::array<Point3, 8> vertices() const;
};

/// Box of `cloud` in the requested orientation.
///
/// OBB: axes are the right singular vectors of the mean-centred coordinate
/// matrix, each sign-fixed so its largest-magnitude component is positive,
/// with the third axis flipped if needed to make the frame right handed.
/// When two or more singular values coincide the orientation inside the
/// degenerate subspace is not determined by the spectrum; in that case a
/// small set of candidate frames built from point differences is scored by
/// box volume and the smallest wins.
///
/// AABB: identity rotation.
///
/// In both modes extents come from exact per-axis min/max of the rotated
/// points, the center is the midpoint of those extremes, and any extent below
/// 1e-9 of the largest (or below 1e-9 when all are zero) is raised to that
/// floor so downstream divisions stay finite.
ObbFrame compute_obb(const PointCloud& cloud, BoxMode mode = BoxMode::OBB);

inline Point3 to_lrf(const ObbFrame& frame, const Point3& p) {
  return frame.rotation.transpose() * (p - frame.center);
}

inline Point3 from_lrf(const ObbFrame& frame, const Point3& p_lrf) {
  return frame.rotation * p_lrf + frame.center;
}

// True when every point of `cloud` lies in the box inflated by `eps`.
bool contains_all(const ObbFrame& frame, const PointCloud& cloud, double eps);

}  // namespace twollsh
