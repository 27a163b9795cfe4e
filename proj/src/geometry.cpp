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

#include "twollsh/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Geometry>
#include <Eigen/SVD>

#include "twollsh/error.hpp"

namespace twollsh {
namespace {

constexpr double kPadFraction = 1e-9;
constexpr double kDegenerateSpectrum = 1e-6;
constexpr std::size_t kMaxSamples = 32;
constexpr std::size_t kMaxCandidateFrames = 256;

void fix_signs(Eigen::Matrix3d& v) {
  for (int c = 0; c < 3; ++c) {
    Eigen::Index row = 0;
    v.col(c).cwiseAbs().maxCoeff(&row);
    if (v(row, c) < 0.0) v.col(c) = -v.col(c);
  }
  if (v.determinant() < 0.0) v.col(2) = -v.col(2);
}

// Per-axis (min, max) of the points expressed in `axes`, relative to `origin`.
std::pair<Eigen::Vector3d, Eigen::Vector3d> rotated_extremes(const PointCloud& cloud,
                                                             const Eigen::Matrix3d& axes,
                                                             const Point3& origin) {
  Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
  Eigen::Vector3d hi = -lo;
  const Eigen::Matrix3d at = axes.transpose();
  for (const auto& p : cloud.points()) {
    const Eigen::Vector3d r = at * (p - origin);
    lo = lo.cwiseMin(r);
    hi = hi.cwiseMax(r);
  }
  return {lo, hi};
}

double box_volume(const PointCloud& cloud, const Eigen::Matrix3d& axes, const Point3& origin) {
  const auto [lo, hi] = rotated_extremes(cloud, axes, origin);
  return (hi - lo).prod();
}

std::vector<Eigen::Vector3d> sample_directions(const PointCloud& cloud, const Point3& mean) {
  std::vector<Point3> samples;
  const std::size_t m = cloud.size();
  const std::size_t count = std::min(m, kMaxSamples);
  for (std::size_t i = 0; i < count; ++i)
    samples.push_back(cloud[static_cast<PointId>(i * m / count)] - mean);

  const double scale = std::max(1e-300, [&] {
    double s = 0.0;
    for (const auto& p : samples) s = std::max(s, p.norm());
    return s;
  }());

  std::vector<Eigen::Vector3d> dirs;
  auto add = [&](const Eigen::Vector3d& d) {
    const double n = d.norm();
    if (n <= 1e-9 * scale) return;
    const Eigen::Vector3d u = d / n;
    for (const auto& e : dirs)
      if (std::abs(std::abs(e.dot(u)) - 1.0) < 1e-12) return;
    dirs.push_back(u);
  };
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (std::size_t j = i + 1; j < samples.size(); ++j) add(samples[j] - samples[i]);
  return dirs;
}

// Candidate frames for a spectrum whose singular values are not all distinct.
// `fixed_axis` is the column whose singular value is isolated, or -1 when all
// three coincide.
Eigen::Matrix3d refine_degenerate(const PointCloud& cloud, const Point3& mean,
                                  const Eigen::Matrix3d& svd_axes, int fixed_axis) {
  const auto dirs = sample_directions(cloud, mean);
  std::vector<Eigen::Matrix3d> frames;

  if (fixed_axis >= 0) {
    const Eigen::Vector3d k = svd_axes.col(fixed_axis);
    for (const auto& d : dirs) {
      Eigen::Vector3d a = d - d.dot(k) * k;
      if (a.norm() < 1e-6) continue;
      a.normalize();
      Eigen::Matrix3d f;
      f.col(fixed_axis) = k;
      f.col((fixed_axis + 1) % 3) = a;
      f.col((fixed_axis + 2) % 3) = k.cross(a);
      frames.push_back(f);
      if (frames.size() >= kMaxCandidateFrames) break;
    }
  } else {
    for (std::size_t i = 0; i < dirs.size() && frames.size() < kMaxCandidateFrames; ++i) {
      for (std::size_t j = i + 1; j < dirs.size() && frames.size() < kMaxCandidateFrames; ++j) {
        if (std::abs(dirs[i].dot(dirs[j])) > 1e-6) continue;
        Eigen::Vector3d b = dirs[j] - dirs[j].dot(dirs[i]) * dirs[i];
        b.normalize();
        Eigen::Matrix3d f;
        f.col(0) = dirs[i];
        f.col(1) = b;
        f.col(2) = dirs[i].cross(b);
        frames.push_back(f);
      }
    }
  }

  Eigen::Matrix3d best = svd_axes;
  double best_volume = box_volume(cloud, svd_axes, mean);
  for (const auto& f : frames) {
    const double v = box_volume(cloud, f, mean);
    if (v < best_volume * (1.0 - 1e-12)) {
      best_volume = v;
      best = f;
    }
  }
  return best;
}

Eigen::Matrix3d principal_axes(const PointCloud& cloud, const Point3& mean) {
  const auto m = static_cast<Eigen::Index>(cloud.size());
  Eigen::Matrix<double, Eigen::Dynamic, 3> centered(m, 3);
  for (Eigen::Index i = 0; i < m; ++i)
    centered.row(i) = (cloud[static_cast<PointId>(i)] - mean).transpose();

  Eigen::JacobiSVD<Eigen::Matrix<double, Eigen::Dynamic, 3>> svd(centered, Eigen::ComputeFullV);
  Eigen::Matrix3d v = svd.matrixV();
  Eigen::Vector3d s = Eigen::Vector3d::Zero();
  s.head(svd.singularValues().size()) = svd.singularValues();
  fix_signs(v);

  const double top = s(0);
  if (top <= 0.0) return Eigen::Matrix3d::Identity();
  auto same = [&](int a, int b) { return std::abs(s(a) - s(b)) <= kDegenerateSpectrum * top; };
  const bool s01 = same(0, 1);
  const bool s12 = same(1, 2);
  if (!s01 && !s12) return v;

  int fixed_axis = -1;
  if (s01 && !s12) fixed_axis = 2;
  if (!s01 && s12) fixed_axis = 0;
  Eigen::Matrix3d refined = refine_degenerate(cloud, mean, v, fixed_axis);
  fix_signs(refined);
  return refined;
}

}  // namespace

std::array<Point3, 8> ObbFrame::vertices() const {
  std::array<Point3, 8> out;
  for (int q = 0; q < 8; ++q) {
    const Eigen::Vector3d sign((q & 1) ? -1.0 : 1.0, (q & 2) ? -1.0 : 1.0, (q & 4) ? -1.0 : 1.0);
    out[q] = from_lrf(*this, sign.cwiseProduct(half_extents));
  }
  return out;
}

ObbFrame compute_obb(const PointCloud& cloud, BoxMode mode) {
  validate(cloud);

  Point3 mean = Point3::Zero();
  for (const auto& p : cloud.points()) mean += p;
  mean /= static_cast<double>(cloud.size());

  ObbFrame frame;
  frame.rotation = mode == BoxMode::OBB ? principal_axes(cloud, mean) : Eigen::Matrix3d::Identity();

  const auto [lo, hi] = rotated_extremes(cloud, frame.rotation, mean);
  const Eigen::Vector3d mid = 0.5 * (lo + hi);
  frame.center = mean + frame.rotation * mid;
  frame.half_extents = 0.5 * (hi - lo);

  const double largest = frame.half_extents.maxCoeff();
  const double floor = kPadFraction * (largest > 0.0 ? largest : 1.0);
  frame.half_extents = frame.half_extents.cwiseMax(floor);
  return frame;
}

bool contains_all(const ObbFrame& frame, const PointCloud& cloud, double eps) {
  for (const auto& p : cloud.points()) {
    const Point3 local = to_lrf(frame, p);
    if ((local.cwiseAbs() - frame.half_extents).maxCoeff() > eps) return false;
  }
  return true;
}

}  // namespace twollsh
