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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace twollsh {

using Point3 = Eigen::Vector3d;
using PointId = std::uint32_t;

/// Squared Euclidean distance. Every structure in the library funnels its
/// distance evaluations through this one expression so that results, ties
/// and the strict radius predicate agree bit for bit across structures.
inline double squared_distance(const Point3& a, const Point3& b) {
  const double dx = a.x() - b.x();
  const double dy = a.y() - b.y();
  const double dz = a.z() - b.z();
  return dx * dx + dy * dy + dz * dz;
}

/// Ordered set of 3D points. The id of a point is its position and never
/// changes after construction.
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(std::vector<Point3> points);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Point3& operator[](PointId id) const { return points_[id]; }
  std::span<const Point3> points() const { return points_; }

  // Axis-aligned extent as (min, max).
  std::pair<Point3, Point3> bounds() const;

 private:
  std::vector<Point3> points_;
};

// Throws EmptyCloud / NonFiniteInput when the cloud is not indexable.
void validate(const PointCloud& cloud);

}  // namespace twollsh
