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

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "twollsh/geometry.hpp"
#include "twollsh/point_cloud.hpp"

namespace twollsh {

inline constexpr int kBlockCount = 24;
// 1e-9 of the unit-box diagonal (2 * sqrt(3)).
inline constexpr double kDefaultAdjacencyEps = 1e-9 * 3.4641016151377544;

/// Two-level hash address: first-level block (1..24) and second-level slice
/// within the block (1..div).
struct BinIndex {
  int block = 1;
  int proj = 1;

  friend auto operator<=>(const BinIndex&, const BinIndex&) = default;
};

/// Oriented plane: a point lies on the inner side when
/// normal.dot(p - point) <= 0. `normal` is unit length and `offset` caches
/// normal.dot(point).
struct Plane {
  Point3 point = Point3::Zero();
  Eigen::Vector3d normal = Eigen::Vector3d::UnitX();
  double offset = 0.0;

  static Plane from_normal_offset(const Eigen::Vector3d& normal, double offset);
  double signed_distance(const Point3& p) const { return normal.dot(p) - offset; }
};

/// One convex cell of a bin. `planes`/`vertices` are in LRF coordinates;
/// `unit_planes`/`unit_vertices` are the same cell in unit-box coordinates
/// (LRF divided component-wise by the half extents), where the cell corners
/// sit on a 1/div lattice and contact tests are well conditioned.
struct ConvexPiece {
  std::vector<Plane> planes;
  std::vector<Point3> vertices;
  std::vector<Plane> unit_planes;
  std::vector<Point3> unit_vertices;

  bool contains(const Point3& p_lrf, double eps) const;
};

/// Region of space that hashes to one bin.
///
/// Most bins are a single convex polytope (5 or 6 faces). The block rule
/// compares signed expressions, so in quadrants where the y and z signs
/// differ the third block is the union of two convex cells; those bins carry
/// two pieces and their shared internal face is not listed in `planes`.
struct BinGeometry {
  std::vector<Plane> planes;     // boundary planes, LRF
  std::vector<Point3> vertices;  // boundary vertices, LRF
  std::vector<ConvexPiece> pieces;

  bool contains(const Point3& p_lrf, double eps) const;
};

struct DivChoice {
  int div = 1;
  int p_avg = 15;
};

struct QuadrantInfo {
  int quadrant = 0;  // 0..7
  Point3 vertex = Point3::Zero();  // OBB corner of that quadrant, LRF
};

// Recommended points-per-bin by cloud size.
int default_p_avg(std::size_t m);

// div = ceil(m / (24 * p_avg)), at least 1.
DivChoice select_div(std::size_t m, std::optional<int> p_avg_override = std::nullopt);

QuadrantInfo quadrant_of(const Point3& p_lrf, const Eigen::Vector3d& half_extents);
int block_of(const Point3& p_lrf, int quadrant, const Point3& quadrant_vertex);
int proj_of(const Point3& p_lrf, int b, const Eigen::Vector3d& half_extents, int div);
BinIndex hash_lrf(const Eigen::Vector3d& half_extents, int div, const Point3& p_lrf);
BinIndex hash_point(const ObbFrame& frame, int div, const Point3& p);

BinGeometry bin_geometry(const ObbFrame& frame, int div, BinIndex bin);

// Adjacency lists (by linear bin id) for a full set of 24 * div geometries.
// Two bins are adjacent when any of their pieces touch within `eps_unit`
// in unit-box coordinates.
std::vector<std::vector<std::uint32_t>> compute_adjacency(std::span<const BinGeometry> geometry,
                                                          double eps_unit = kDefaultAdjacencyEps);

/// Built two-level hash over a point cloud. Immutable after build().
class HashIndex {
 public:
  HashIndex() = default;

  static HashIndex build(std::shared_ptr<const PointCloud> cloud, BoxMode mode = BoxMode::OBB,
                         std::optional<int> p_avg_override = std::nullopt);

  const ObbFrame& frame() const { return frame_; }
  int div() const { return div_; }
  int p_avg() const { return p_avg_; }
  std::size_t bin_count() const { return static_cast<std::size_t>(kBlockCount) * div_; }
  const PointCloud& cloud() const { return *cloud_; }
  std::shared_ptr<const PointCloud> shared_cloud() const { return cloud_; }
  bool empty() const { return !cloud_ || cloud_->empty(); }

  std::uint32_t linear(BinIndex bin) const;
  BinIndex bin_at(std::uint32_t linear) const;

  std::span<const PointId> points_in(std::uint32_t linear) const;
  std::span<const PointId> points_in(BinIndex bin) const { return points_in(linear(bin)); }
  // First-level table entry: linear ids of the div bins of `block`.
  std::pair<std::uint32_t, std::uint32_t> block_range(int block) const;

  const BinGeometry& geometry(std::uint32_t linear) const { return geometry_[linear]; }
  const BinGeometry& geometry(BinIndex bin) const { return geometry_[linear(bin)]; }
  std::span<const std::uint32_t> neighbors(std::uint32_t linear) const;

  // Bin used as the starting point of a search from q. Queries outside the
  // box start from the bin of their closest box point.
  std::uint32_t home_bin(const Point3& q) const;

  // Tolerance used for containment and pruning slack, 1e-9 of the diagonal.
  double eps() const { return 1e-9 * frame_.diagonal(); }

  // 24 * div bin heads plus one entry per point.
  std::size_t pointer_count() const { return bin_count() + (cloud_ ? cloud_->size() : 0); }

 private:
  std::shared_ptr<const PointCloud> cloud_;
  ObbFrame frame_;
  int div_ = 1;
  int p_avg_ = 15;
  std::vector<std::uint32_t> bin_offsets_;
  std::vector<PointId> bin_ids_;
  std::vector<BinGeometry> geometry_;
  std::vector<std::uint32_t> adjacency_offsets_;
  std::vector<std::uint32_t> adjacency_ids_;
};

}  // namespace twollsh
