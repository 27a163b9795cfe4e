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

// Helpers shared by the test binaries: independent linear-scan oracles and
// small geometry utilities that deliberately avoid the library's own code
// paths.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "twollsh/point_cloud.hpp"

namespace twollsh::testing {

inline double oracle_d2(const Point3& a, const Point3& b) {
  const double dx = a.x() - b.x();
  const double dy = a.y() - b.y();
  const double dz = a.z() - b.z();
  return dx * dx + dy * dy + dz * dz;
}

// Sorted (d2, id) pairs for the whole cloud.
inline std::vector<std::pair<double, PointId>> ranked(const PointCloud& cloud, const Point3& q) {
  std::vector<std::pair<double, PointId>> all;
  all.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto id = static_cast<PointId>(i);
    all.emplace_back(oracle_d2(cloud[id], q), id);
  }
  std::sort(all.begin(), all.end());
  return all;
}

inline std::vector<PointId> knn_ids_from(const std::vector<std::pair<double, PointId>>& all, std::size_t k) {
  std::vector<PointId> out;
  for (std::size_t i = 0; i < std::min(k, all.size()); ++i) out.push_back(all[i].second);
  return out;
}

inline std::vector<PointId> radius_ids_from(const std::vector<std::pair<double, PointId>>& all, double r) {
  std::vector<PointId> out;
  for (const auto& [d2, id] : all) {
    if (!(d2 < r * r)) break;
    out.push_back(id);
  }
  return out;
}

inline std::vector<PointId> oracle_knn_ids(const PointCloud& cloud, const Point3& q, std::size_t k) {
  return knn_ids_from(ranked(cloud, q), k);
}

inline std::vector<PointId> oracle_radius_ids(const PointCloud& cloud, const Point3& q, double r) {
  return radius_ids_from(ranked(cloud, q), r);
}

inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond qr(n(rng), n(rng), n(rng), n(rng));
  qr.normalize();
  return qr.toRotationMatrix();
}

inline PointCloud transformed(const PointCloud& cloud, const Eigen::Matrix3d& rot, const Point3& shift,
                              double scale = 1.0) {
  std::vector<Point3> pts;
  pts.reserve(cloud.size());
  for (const auto& p : cloud.points()) pts.push_back(scale * (rot * p) + shift);
  return PointCloud(std::move(pts));
}

}  // namespace twollsh::testing
