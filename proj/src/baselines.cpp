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

#include "twollsh/baselines.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "twollsh/error.hpp"

namespace twollsh {
namespace {

void check_k(std::size_t k) {
  if (k == 0) throw Error(ErrorCode::KZero, "k must be at least 1");
}

void check_r(double r) {
  if (!(r > 0.0)) throw Error(ErrorCode::RNonPositive, "radius must be positive");
}

double tolerance_for(const Point3& lo, const Point3& hi) {
  const double diag = (hi - lo).norm();
  return 1e-9 * (diag > 0.0 ? diag : 1.0);
}

}  // namespace

QueryResult bruteforce_knn(const PointCloud& cloud, const Point3& q, std::size_t k) {
  validate(cloud);
  check_k(k);
  QueryResult out;
  out.hits.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto id = static_cast<PointId>(i);
    out.hits.push_back({id, squared_distance(cloud[id], q)});
  }
  k = std::min(k, out.hits.size());
  std::partial_sort(out.hits.begin(), out.hits.begin() + static_cast<std::ptrdiff_t>(k), out.hits.end(), closer);
  out.hits.resize(k);
  return out;
}

QueryResult bruteforce_radius(const PointCloud& cloud, const Point3& q, double r) {
  validate(cloud);
  check_r(r);
  const double r2 = r * r;
  QueryResult out;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto id = static_cast<PointId>(i);
    const double d2 = squared_distance(cloud[id], q);
    if (d2 < r2) out.hits.push_back({id, d2});
  }
  sort_hits(out);
  return out;
}

BruteForce::BruteForce(std::shared_ptr<const PointCloud> cloud) : cloud_(std::move(cloud)) {
  if (!cloud_) throw Error(ErrorCode::EmptyCloud, "null point cloud");
  validate(*cloud_);
}

QueryResult BruteForce::knn(const Point3& q, std::size_t k, SearchStats* stats) const {
  if (stats) stats->points_examined += cloud_->size();
  return bruteforce_knn(*cloud_, q, k);
}

QueryResult BruteForce::radius(const Point3& q, double r, SearchStats* stats) const {
  if (stats) stats->points_examined += cloud_->size();
  return bruteforce_radius(*cloud_, q, r);
}

// ---------------------------------------------------------------------------
// Kd-tree

std::uint64_t kdtree_pointer_count(std::uint64_t m) {
  int levels = 0;
  while ((std::uint64_t{1} << levels) < m + 1) ++levels;
  const std::uint64_t full = (std::uint64_t{1} << levels) - 1;
  return std::min(full, m);
}

KdTree::KdTree(std::shared_ptr<const PointCloud> cloud) : cloud_(std::move(cloud)) {
  if (!cloud_) throw Error(ErrorCode::EmptyCloud, "null point cloud");
  validate(*cloud_);
  std::vector<PointId> ids(cloud_->size());
  std::iota(ids.begin(), ids.end(), PointId{0});
  nodes_.reserve(ids.size());
  root_ = build(ids, 0, ids.size(), 0);
}

std::int32_t KdTree::build(std::vector<PointId>& ids, std::size_t lo, std::size_t hi, std::size_t depth) {
  if (lo >= hi) return -1;
  depth_ = std::max(depth_, depth + 1);
  const auto axis = static_cast<std::uint8_t>(depth % 3);
  const std::size_t mid = lo + (hi - lo) / 2;
  const PointCloud& cloud = *cloud_;
  std::nth_element(ids.begin() + static_cast<std::ptrdiff_t>(lo), ids.begin() + static_cast<std::ptrdiff_t>(mid),
                   ids.begin() + static_cast<std::ptrdiff_t>(hi), [&](PointId a, PointId b) {
                     const double ca = cloud[a][axis];
                     const double cb = cloud[b][axis];
                     return ca < cb || (ca == cb && a < b);
                   });
  const auto index = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back({ids[mid], -1, -1, axis});
  const std::int32_t left = build(ids, lo, mid, depth + 1);
  const std::int32_t right = build(ids, mid + 1, hi, depth + 1);
  nodes_[static_cast<std::size_t>(index)].left = left;
  nodes_[static_cast<std::size_t>(index)].right = right;
  return index;
}

void KdTree::knn_visit(std::int32_t node, const Point3& q, KBest& best, SearchStats& stats) const {
  if (node < 0) return;
  const Node& n = nodes_[static_cast<std::size_t>(node)];
  const Point3& p = (*cloud_)[n.id];
  ++stats.cells_visited;
  ++stats.points_examined;
  best.offer(n.id, squared_distance(p, q));

  const double diff = q[n.axis] - p[n.axis];
  const std::int32_t near = diff < 0.0 ? n.left : n.right;
  const std::int32_t far = diff < 0.0 ? n.right : n.left;
  knn_visit(near, q, best, stats);
  if (!best.full() || diff * diff <= best.worst_squared()) knn_visit(far, q, best, stats);
}

void KdTree::radius_visit(std::int32_t node, const Point3& q, double r2, QueryResult& out,
                          SearchStats& stats) const {
  if (node < 0) return;
  const Node& n = nodes_[static_cast<std::size_t>(node)];
  const Point3& p = (*cloud_)[n.id];
  ++stats.cells_visited;
  ++stats.points_examined;
  const double d2 = squared_distance(p, q);
  if (d2 < r2) out.hits.push_back({n.id, d2});

  const double diff = q[n.axis] - p[n.axis];
  radius_visit(diff < 0.0 ? n.left : n.right, q, r2, out, stats);
  if (diff * diff < r2) radius_visit(diff < 0.0 ? n.right : n.left, q, r2, out, stats);
}

QueryResult KdTree::knn(const Point3& q, std::size_t k, SearchStats* stats) const {
  check_k(k);
  SearchStats local;
  KBest best(std::min(k, cloud_->size()));
  knn_visit(root_, q, best, local);
  if (stats) *stats += local;
  return best.take();
}

QueryResult KdTree::radius(const Point3& q, double r, SearchStats* stats) const {
  check_r(r);
  SearchStats local;
  QueryResult out;
  radius_visit(root_, q, r * r, out, local);
  sort_hits(out);
  if (stats) *stats += local;
  return out;
}

// ---------------------------------------------------------------------------
// Octree

int default_octree_layer(std::size_t m) {
  if (m < 10000) return 4;
  if (m < 100000) return 6;
  if (m < 200000) return 7;
  return 8;
}

std::uint64_t octree_pointer_count(int layer, std::uint64_t m) {
  std::uint64_t nodes = 0;
  std::uint64_t level = 1;
  for (int i = 1; i <= layer; ++i) {
    nodes += level;
    level *= 8;
  }
  return nodes + m;
}

Octree::Octree(std::shared_ptr<const PointCloud> cloud, int layer) : cloud_(std::move(cloud)), layer_(layer) {
  if (!cloud_) throw Error(ErrorCode::EmptyCloud, "null point cloud");
  validate(*cloud_);
  if (layer < 1) throw Error(ErrorCode::InvalidArgument, "octree layer must be at least 1");
  if (layer > 10 || octree_pointer_count(layer, 0) > kMaxNodes)
    throw Error(ErrorCode::LayerTooLarge, "octree layer " + std::to_string(layer) + " exceeds the node budget");

  auto [lo, hi] = cloud_->bounds();
  eps_ = tolerance_for(lo, hi);
  for (int a = 0; a < 3; ++a) {
    if (hi[a] - lo[a] < eps_) {
      lo[a] -= eps_;
      hi[a] += eps_;
    }
  }
  root_ = {lo, hi};

  const std::uint64_t total = octree_pointer_count(layer_, 0);
  const int leaf_level = layer_ - 1;
  const std::uint64_t cells = std::uint64_t{1} << leaf_level;
  const std::uint64_t leaves = std::uint64_t{1} << (3 * leaf_level);
  counts_.assign(total, 0);

  const std::size_t m = cloud_->size();
  std::vector<std::uint64_t> leaf_of(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Point3& p = (*cloud_)[static_cast<PointId>(i)];
    std::array<std::uint64_t, 3> cell{};
    for (int a = 0; a < 3; ++a) {
      const double f = std::floor((p[a] - lo[a]) / (hi[a] - lo[a]) * static_cast<double>(cells));
      cell[a] = static_cast<std::uint64_t>(std::clamp(f, 0.0, static_cast<double>(cells - 1)));
    }
    std::uint64_t code = 0;
    for (int level = 1; level <= leaf_level; ++level) {
      const int bit = leaf_level - level;
      const std::uint64_t octant = ((cell[0] >> bit) & 1) | (((cell[1] >> bit) & 1) << 1) | (((cell[2] >> bit) & 1) << 2);
      code = code * 8 + octant;
    }
    leaf_of[i] = code;
    for (int level = 0; level <= leaf_level; ++level)
      ++counts_[level_offset(level) + (code >> (3 * (leaf_level - level)))];
  }

  leaf_offsets_.assign(leaves + 1, 0);
  for (std::size_t i = 0; i < m; ++i) ++leaf_offsets_[leaf_of[i] + 1];
  for (std::uint64_t l = 0; l < leaves; ++l) leaf_offsets_[l + 1] += leaf_offsets_[l];
  leaf_ids_.resize(m);
  std::vector<std::uint32_t> cursor(leaf_offsets_.begin(), leaf_offsets_.end() - 1);
  for (std::size_t i = 0; i < m; ++i) leaf_ids_[cursor[leaf_of[i]]++] = static_cast<PointId>(i);
}

std::uint64_t Octree::level_offset(int level) const { return octree_pointer_count(level, 0); }

Octree::Box Octree::child_box(const Box& box, int octant) const {
  const Point3 mid = 0.5 * (box.lo + box.hi);
  Box out = box;
  for (int a = 0; a < 3; ++a) {
    if ((octant >> a) & 1) {
      out.lo[a] = mid[a];
    } else {
      out.hi[a] = mid[a];
    }
  }
  return out;
}

namespace {

double box_distance_squared(const Point3& lo, const Point3& hi, const Point3& q, double eps) {
  double d2 = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double d = std::max({lo[a] - eps - q[a], 0.0, q[a] - hi[a] - eps});
    d2 += d * d;
  }
  return d2;
}

bool ball_inside(const Point3& lo, const Point3& hi, const Point3& q, double radius) {
  for (int a = 0; a < 3; ++a)
    if (q[a] - lo[a] < radius || hi[a] - q[a] < radius) return false;
  return true;
}

}  // namespace

bool Octree::knn_visit(int level, std::uint64_t code, const Box& box, const Point3& q, KBest& best,
                       SearchStats& stats) const {
  if (counts_[level_offset(level) + code] == 0) return false;
  ++stats.cells_visited;

  if (level == layer_ - 1) {
    for (std::uint32_t i = leaf_offsets_[code]; i < leaf_offsets_[code + 1]; ++i) {
      const PointId id = leaf_ids_[i];
      ++stats.points_examined;
      best.offer(id, squared_distance((*cloud_)[id], q));
    }
    return false;
  }

  std::array<std::pair<double, int>, 8> order;
  std::array<Box, 8> boxes;
  for (int o = 0; o < 8; ++o) {
    boxes[o] = child_box(box, o);
    order[o] = {box_distance_squared(boxes[o].lo, boxes[o].hi, q, eps_), o};
  }
  std::sort(order.begin(), order.end());

  for (const auto& [d2, o] : order) {
    if (best.full() && d2 > best.worst_squared()) break;
    if (knn_visit(level + 1, code * 8 + static_cast<std::uint64_t>(o), boxes[o], q, best, stats)) return true;
    // Once the k-th distance ball fits inside the child just searched, no
    // point outside it can enter the result.
    if (best.full()) {
      const double reach = std::sqrt(best.worst_squared()) * (1.0 + 1e-12) + eps_;
      if (ball_inside(boxes[o].lo, boxes[o].hi, q, reach)) return true;
    }
  }
  return false;
}

void Octree::radius_visit(int level, std::uint64_t code, const Box& box, const Point3& q, double r2,
                          QueryResult& out, SearchStats& stats) const {
  if (counts_[level_offset(level) + code] == 0) return;
  if (box_distance_squared(box.lo, box.hi, q, eps_) >= r2) return;
  ++stats.cells_visited;

  if (level == layer_ - 1) {
    for (std::uint32_t i = leaf_offsets_[code]; i < leaf_offsets_[code + 1]; ++i) {
      const PointId id = leaf_ids_[i];
      ++stats.points_examined;
      const double d2 = squared_distance((*cloud_)[id], q);
      if (d2 < r2) out.hits.push_back({id, d2});
    }
    return;
  }
  for (int o = 0; o < 8; ++o)
    radius_visit(level + 1, code * 8 + static_cast<std::uint64_t>(o), child_box(box, o), q, r2, out, stats);
}

QueryResult Octree::knn(const Point3& q, std::size_t k, SearchStats* stats) const {
  check_k(k);
  SearchStats local;
  KBest best(std::min(k, cloud_->size()));
  knn_visit(0, 0, root_, q, best, local);
  if (stats) *stats += local;
  return best.take();
}

QueryResult Octree::radius(const Point3& q, double r, SearchStats* stats) const {
  check_r(r);
  SearchStats local;
  QueryResult out;
  radius_visit(0, 0, root_, q, r * r, out, local);
  sort_hits(out);
  if (stats) *stats += local;
  return out;
}

}  // namespace twollsh
