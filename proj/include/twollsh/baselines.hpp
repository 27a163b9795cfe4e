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
#include <memory>
#include <string>
#include <vector>

#include "twollsh/point_cloud.hpp"
#include "twollsh/result.hpp"

namespace twollsh {

/// Common surface of every exact neighbour structure the harness compares.
class NeighborStructure {
 public:
  virtual ~NeighborStructure() = default;

  virtual std::string name() const = 0;
  virtual QueryResult knn(const Point3& q, std::size_t k, SearchStats* stats = nullptr) const = 0;
  virtual QueryResult radius(const Point3& q, double r, SearchStats* stats = nullptr) const = 0;
  // Structural pointers under the 4-byte-per-pointer memory model.
  virtual std::uint64_t pointer_count() const = 0;
};

// Linear scan. This is the ground truth every other structure is checked
// against.
QueryResult bruteforce_knn(const PointCloud& cloud, const Point3& q, std::size_t k);
QueryResult bruteforce_radius(const PointCloud& cloud, const Point3& q, double r);

class BruteForce final : public NeighborStructure {
 public:
  explicit BruteForce(std::shared_ptr<const PointCloud> cloud);

  std::string name() const override { return "bruteforce"; }
  QueryResult knn(const Point3& q, std::size_t k, SearchStats* stats = nullptr) const override;
  QueryResult radius(const Point3& q, double r, SearchStats* stats = nullptr) const override;
  std::uint64_t pointer_count() const override { return 0; }

 private:
  std::shared_ptr<const PointCloud> cloud_;
};

// min(sum_{i=1}^{ceil(log2(m+1))} 2^(i-1), m)
std::uint64_t kdtree_pointer_count(std::uint64_t m);

/// 3-d tree with one point per node, split at the median of the axis that
/// cycles x, y, z with depth. Queries backtrack into the far child whenever
/// the splitting plane is not farther than the current bound.
class KdTree final : public NeighborStructure {
 public:
  explicit KdTree(std::shared_ptr<const PointCloud> cloud);

  std::string name() const override { return "kdtree"; }
  QueryResult knn(const Point3& q, std::size_t k, SearchStats* stats = nullptr) const override;
  QueryResult radius(const Point3& q, double r, SearchStats* stats = nullptr) const override;
  std::uint64_t pointer_count() const override { return kdtree_pointer_count(cloud_->size()); }

  std::size_t depth() const { return depth_; }

 private:
  struct Node {
    PointId id;
    std::int32_t left;
    std::int32_t right;
    std::uint8_t axis;
  };

  std::int32_t build(std::vector<PointId>& ids, std::size_t lo, std::size_t hi, std::size_t depth);
  void knn_visit(std::int32_t node, const Point3& q, KBest& best, SearchStats& stats) const;
  void radius_visit(std::int32_t node, const Point3& q, double r2, QueryResult& out, SearchStats& stats) const;

  std::shared_ptr<const PointCloud> cloud_;
  std::vector<Node> nodes_;
  std::int32_t root_ = -1;
  std::size_t depth_ = 0;
};

// Recommended octree depth by cloud size.
int default_octree_layer(std::size_t m);

// sum_{i=1}^{layer} 8^(i-1) + m
std::uint64_t octree_pointer_count(int layer, std::uint64_t m);

/// Complete octree of fixed depth over the axis-aligned bounding box. Every
/// internal node down to `layer` exists whether or not it holds points;
/// point ids live in the leaves.
class Octree final : public NeighborStructure {
 public:
  // Node count guard: more than 8^9 nodes throws LayerTooLarge.
  static constexpr std::uint64_t kMaxNodes = 134217728;

  Octree(std::shared_ptr<const PointCloud> cloud, int layer);

  std::string name() const override { return "octree"; }
  QueryResult knn(const Point3& q, std::size_t k, SearchStats* stats = nullptr) const override;
  QueryResult radius(const Point3& q, double r, SearchStats* stats = nullptr) const override;
  std::uint64_t pointer_count() const override { return octree_pointer_count(layer_, cloud_->size()); }

  int layer() const { return layer_; }
  std::uint64_t node_count() const { return counts_.size(); }

 private:
  struct Box {
    Point3 lo;
    Point3 hi;
  };

  std::uint64_t level_offset(int level) const;
  Box child_box(const Box& box, int octant) const;
  bool knn_visit(int level, std::uint64_t code, const Box& box, const Point3& q, KBest& best,
                 SearchStats& stats) const;
  void radius_visit(int level, std::uint64_t code, const Box& box, const Point3& q, double r2,
                    QueryResult& out, SearchStats& stats) const;

  std::shared_ptr<const PointCloud> cloud_;
  int layer_;
  Box root_;
  double eps_ = 0.0;
  std::vector<std::uint32_t> counts_;       // points under each node, level order
  std::vector<std::uint32_t> leaf_offsets_;
  std::vector<PointId> leaf_ids_;
};

}  // namespace twollsh
