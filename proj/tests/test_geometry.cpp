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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "support.hpp"
#include "twollsh/error.hpp"
#include "twollsh/geometry.hpp"
#include "twollsh/synthetic.hpp"

namespace twollsh {
namespace {

PointCloud unit_cube_corners() {
  std::vector<Point3> pts;
  for (int z = 0; z < 2; ++z)
    for (int y = 0; y < 2; ++y)
      for (int x = 0; x < 2; ++x) pts.emplace_back(x, y, z);
  return PointCloud(std::move(pts));
}

void expect_valid_frame(const ObbFrame& f) {
  const Eigen::Matrix3d gram = f.rotation.transpose() * f.rotation;
  EXPECT_LT((gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_NEAR(f.rotation.determinant(), 1.0, 1e-9);
  EXPECT_GT(f.half_extents.minCoeff(), 0.0);
}

TEST(ComputeObb, AabbOfUnitCube) {
  const ObbFrame f = compute_obb(unit_cube_corners(), BoxMode::AABB);
  EXPECT_TRUE(f.center.isApprox(Point3(0.5, 0.5, 0.5)));
  EXPECT_TRUE(f.half_extents.isApprox(Eigen::Vector3d(0.5, 0.5, 0.5)));
  EXPECT_TRUE(f.rotation.isIdentity());
}

TEST(ComputeObb, RecoversRotatedCube) {
  const Eigen::Matrix3d rz = Eigen::AngleAxisd(std::numbers::pi / 4, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  const PointCloud cloud = testing::transformed(unit_cube_corners(), rz, Point3(3, -1, 2));
  const ObbFrame f = compute_obb(cloud, BoxMode::OBB);
  expect_valid_frame(f);

  std::array<double, 3> e{f.half_extents.x(), f.half_extents.y(), f.half_extents.z()};
  std::sort(e.begin(), e.end());
  for (const double v : e) EXPECT_NEAR(v, 0.5, 1e-6);
  EXPECT_NEAR(f.volume(), 1.0, 1e-6);
  EXPECT_TRUE(contains_all(f, cloud, 1e-9 * f.diagonal()));
}

TEST(ComputeObb, RepeatedPointIsPaddedNotRejected) {
  const PointCloud cloud({Point3(1, 2, 3), Point3(1, 2, 3), Point3(1, 2, 3)});
  const ObbFrame f = compute_obb(cloud);
  EXPECT_NEAR((f.center - Point3(1, 2, 3)).norm(), 0.0, 1e-12);
  for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(f.half_extents[i], 1e-9);
  expect_valid_frame(f);
}

TEST(ComputeObb, FlatCloudGetsRelativeFloor) {
  // All points on z = 5: the thin extent is raised to 1e-9 of the largest.
  std::vector<Point3> pts;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 500; ++i) pts.emplace_back(u(rng), 0.5 * u(rng), 5.0);
  const ObbFrame f = compute_obb(PointCloud(pts));
  const double largest = f.half_extents.maxCoeff();
  EXPECT_GE(f.half_extents.minCoeff(), 1e-9 * largest * (1 - 1e-12));
  EXPECT_LT(f.half_extents.minCoeff(), 1e-6);
  expect_valid_frame(f);
}

TEST(ComputeObb, RejectsEmptyAndNonFinite) {
  try {
    compute_obb(PointCloud());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyCloud);
  }
  const PointCloud bad({Point3(0, 0, 0), Point3(std::numeric_limits<double>::quiet_NaN(), 0, 0)});
  try {
    compute_obb(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteInput);
  }
}

TEST(ComputeObb, SignConventionIsDeterministic) {
  const PointCloud cloud = generate_cloud(ShapeFamily::Ellipsoid, 3000, 11);
  const ObbFrame a = compute_obb(cloud);
  const ObbFrame b = compute_obb(cloud);
  EXPECT_EQ(a.rotation, b.rotation);
  EXPECT_EQ(a.center, b.center);
  // First two axes: largest-magnitude component positive.
  for (int c = 0; c < 2; ++c) {
    Eigen::Index row = 0;
    a.rotation.col(c).cwiseAbs().maxCoeff(&row);
    EXPECT_GT(a.rotation(row, c), 0.0);
  }
}

TEST(ComputeObb, ContainmentOnEveryFamilyBothModes) {
  for (const auto family : kAllShapeFamilies) {
    for (const std::uint64_t seed : {1u, 2u, 3u}) {
      const PointCloud cloud = generate_cloud(family, 2000, seed);
      for (const auto mode : {BoxMode::OBB, BoxMode::AABB}) {
        const ObbFrame f = compute_obb(cloud, mode);
        expect_valid_frame(f);
        EXPECT_TRUE(contains_all(f, cloud, 1e-9 * f.diagonal())) << to_string(family) << " seed " << seed;
      }
    }
  }
}

TEST(ComputeObb, VolumeIsRotationInvariantOnEllipsoids) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    const PointCloud base = generate_cloud(ShapeFamily::Ellipsoid, 2000, 100 + trial);
    const double v0 = compute_obb(base).volume();
    const PointCloud turned = testing::transformed(base, testing::random_rotation(rng), Point3(7, -3, 12));
    const double v1 = compute_obb(turned).volume();
    EXPECT_LT(std::abs(v1 - v0) / v0, 0.01) << "trial " << trial;
  }
}

TEST(ComputeObb, VerticesFollowQuadrantBits) {
  const ObbFrame f = compute_obb(generate_cloud(ShapeFamily::UniformBox, 500, 5));
  const auto v = f.vertices();
  for (int bits = 0; bits < 8; ++bits) {
    const Point3 local = to_lrf(f, v[static_cast<std::size_t>(bits)]);
    EXPECT_EQ(local.x() < 0, (bits & 1) != 0);
    EXPECT_EQ(local.y() < 0, (bits & 2) != 0);
    EXPECT_EQ(local.z() < 0, (bits & 4) != 0);
    EXPECT_TRUE(local.cwiseAbs().isApprox(f.half_extents, 1e-12));
  }
}

TEST(Lrf, CenterMapsToOrigin) {
  const ObbFrame f = compute_obb(generate_cloud(ShapeFamily::Ellipsoid, 400, 2));
  EXPECT_LT(to_lrf(f, f.center).norm(), 1e-12);
  EXPECT_EQ(from_lrf(f, Point3::Zero()), f.center);
}

TEST(Lrf, PureTranslation) {
  ObbFrame f;
  f.center = Point3(1, 1, 1);
  EXPECT_EQ(to_lrf(f, Point3(2, 1, 1)), Point3(1, 0, 0));
  f.center = Point3::Zero();
  EXPECT_EQ(from_lrf(f, Point3(4, -5, 6)), Point3(4, -5, 6));
}

TEST(Lrf, RoundTripOnRandomFrames) {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int frame_no = 0; frame_no < 10; ++frame_no) {
    ObbFrame f;
    f.rotation = testing::random_rotation(rng);
    f.center = Point3(u(rng), u(rng), u(rng));
    f.half_extents = Eigen::Vector3d(1 + std::abs(u(rng)), 1 + std::abs(u(rng)), 1 + std::abs(u(rng)));
    for (int i = 0; i < 100; ++i) {
      const Point3 p(u(rng), u(rng), u(rng));
      EXPECT_LE((from_lrf(f, to_lrf(f, p)) - p).norm(), 1e-12 * f.diagonal());
    }
  }
}

}  // namespace
}  // namespace twollsh
