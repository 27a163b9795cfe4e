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

#include "twollsh/synthetic.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "twollsh/error.hpp"

namespace twollsh {
namespace {

Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q.toRotationMatrix();
}

}  // namespace

const char* to_string(ShapeFamily family) {
  switch (family) {
    case ShapeFamily::UniformBox: return "box";
    case ShapeFamily::SphereShell: return "shell";
    case ShapeFamily::Ellipsoid: return "ellipsoid";
    case ShapeFamily::GaussianClusters: return "clusters";
    case ShapeFamily::PlanarSlab: return "slab";
  }
  return "unknown";
}

ShapeFamily parse_shape_family(std::string_view name) {
  for (const auto f : kAllShapeFamilies)
    if (name == to_string(f)) return f;
  throw Error(ErrorCode::InvalidArgument, "unknown shape family '" + std::string(name) + "'");
}

PointCloud generate_cloud(ShapeFamily family, std::size_t m, std::uint64_t seed, double span) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Point3 center = Point3::Constant(0.5 * span);
  std::vector<Point3> points;
  points.reserve(m);

  switch (family) {
    case ShapeFamily::UniformBox:
      for (std::size_t i = 0; i < m; ++i) points.emplace_back(span * unit(rng), span * unit(rng), span * unit(rng));
      break;

    case ShapeFamily::SphereShell:
      for (std::size_t i = 0; i < m; ++i) {
        Eigen::Vector3d d(normal(rng), normal(rng), normal(rng));
        if (d.squaredNorm() == 0.0) d = Eigen::Vector3d::UnitX();
        const double radius = span * (0.48 + 0.02 * unit(rng));
        points.push_back(center + radius * d.normalized());
      }
      break;

    case ShapeFamily::Ellipsoid: {
      const Eigen::Matrix3d rot = random_rotation(rng);
      const Eigen::Vector3d axes = span * Eigen::Vector3d(0.5, 0.25, 0.1);
      while (points.size() < m) {
        const Eigen::Vector3d b(2.0 * unit(rng) - 1.0, 2.0 * unit(rng) - 1.0, 2.0 * unit(rng) - 1.0);
        if (b.squaredNorm() > 1.0) continue;
        points.push_back(center + rot * b.cwiseProduct(axes));
      }
      break;
    }

    case ShapeFamily::GaussianClusters: {
      std::vector<Point3> centers;
      for (int c = 0; c < 8; ++c)
        centers.emplace_back(span * (0.15 + 0.7 * unit(rng)), span * (0.15 + 0.7 * unit(rng)),
                             span * (0.15 + 0.7 * unit(rng)));
      std::uniform_int_distribution<std::size_t> pick(0, centers.size() - 1);
      const double sigma = 0.04 * span;
      for (std::size_t i = 0; i < m; ++i) {
        const Point3& c = centers[pick(rng)];
        points.push_back(c + sigma * Eigen::Vector3d(normal(rng), normal(rng), normal(rng)));
      }
      break;
    }

    case ShapeFamily::PlanarSlab: {
      const Eigen::Matrix3d rot = random_rotation(rng);
      for (std::size_t i = 0; i < m; ++i) {
        const Eigen::Vector3d local(span * (unit(rng) - 0.5), span * (unit(rng) - 0.5), 0.02 * span * (unit(rng) - 0.5));
        points.push_back(center + rot * local);
      }
      break;
    }
  }
  return PointCloud(std::move(points));
}

}  // namespace twollsh
