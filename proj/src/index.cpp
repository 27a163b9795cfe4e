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

#include "twollsh/index.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "twollsh/error.hpp"

namespace twollsh {
namespace {

constexpr double kLatticeTol = 1e-12;

// Half-space a.x <= b in unit-box coordinates, with |a| = 1.
struct HalfSpace {
  Eigen::Vector3d a;
  double b;
};

HalfSpace normalized(const Eigen::Vector3d& a, double b) {
  const double n = a.norm();
  return {a / n, b / n};
}

Eigen::Vector3d quadrant_signs(int quadrant) {
  return {(quadrant & 1) ? -1.0 : 1.0, (quadrant & 2) ? -1.0 : 1.0, (quadrant & 4) ? -1.0 : 1.0};
}

// Wedges through the origin whose union is the region of block `b` inside a
// quadrant, written in quadrant-positive coordinates (u, v, w) = |X|. Each
// wedge is two constraints alpha.(u, v, w) <= 0. They are the closures of the
// three cases of the block rule:
//   b = 1:  sy(v - u) > 0  and sz(w - u) > 0
//   b = 2:  sy(v - u) <= 0 and sz(w - v) > 0
//   b = 3:  otherwise, which is one wedge when sy == sz and two otherwise.
std::vector<std::array<Eigen::Vector3d, 2>> block_wedges(double sy, double sz, int b) {
  using V = Eigen::Vector3d;
  switch (b) {
    case 1:
      return {{V(sy, -sy, 0.0), V(sz, 0.0, -sz)}};
    case 2:
      return {{V(-sy, sy, 0.0), V(0.0, sz, -sz)}};
    default:
      if (sy == sz) return {{V(-sz, 0.0, sz), V(0.0, -sz, sz)}};
      return {{V(-sy, sy, 0.0), V(0.0, -sz, sz)},   // sy(v-u) <= 0, sz(w-v) <= 0
              {V(sy, -sy, 0.0), V(-sz, 0.0, sz)}};  // sy(v-u) >= 0, sz(w-u) <= 0
  }
}

std::vector<Point3> enumerate_vertices(std::span<const HalfSpace> hs, double tol) {
  std::vector<Point3> out;
  const std::size_t n = hs.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        Eigen::Matrix3d a;
        a.row(0) = hs[i].a.transpose();
        a.row(1) = hs[j].a.transpose();
        a.row(2) = hs[k].a.transpose();
        const double det = a.determinant();
        if (std::abs(det) < 1e-12) continue;
        const Point3 x = a.partialPivLu().solve(Eigen::Vector3d(hs[i].b, hs[j].b, hs[k].b));
        bool feasible = true;
        for (const auto& h : hs) {
          if (h.a.dot(x) > h.b + tol) {
            feasible = false;
            break;
          }
        }
        if (!feasible) continue;
        bool duplicate = false;
        for (const auto& v : out) {
          if ((v - x).squaredNorm() < tol * tol) {
            duplicate = true;
            break;
          }
        }
        if (!duplicate) out.push_back(x);
      }
    }
  }
  return out;
}

// A constraint bounds a 2D face when at least three non-collinear vertices
// lie on it.
bool is_facet(const HalfSpace& h, std::span<const Point3> vertices) {
  std::vector<Point3> on;
  for (const auto& v : vertices)
    if (std::abs(h.a.dot(v) - h.b) <= 1e-10) on.push_back(v);
  if (on.size() < 3) return false;
  for (std::size_t i = 1; i < on.size(); ++i)
    for (std::size_t j = i + 1; j < on.size(); ++j)
      if ((on[i] - on[0]).cross(on[j] - on[0]).norm() > 1e-10) return true;
  return false;
}

bool same_plane(const HalfSpace& x, const HalfSpace& y) {
  return (x.a - y.a).norm() < 1e-12 && std::abs(x.b - y.b) < 1e-12;
}

bool opposite_plane(const HalfSpace& x, const HalfSpace& y) {
  return (x.a + y.a).norm() < 1e-12 && std::abs(x.b + y.b) < 1e-12;
}

Plane to_lrf_plane(const HalfSpace& h, const Eigen::Vector3d& half) {
  const Eigen::Vector3d g = h.a.cwiseQuotient(half);
  const double n = g.norm();
  return Plane::from_normal_offset(g / n, h.b / n);
}

Plane to_unit_plane(const HalfSpace& h) { return Plane::from_normal_offset(h.a, h.b); }

bool inside_all(std::span<const Plane> planes, const Point3& p, double eps) {
  for (const auto& pl : planes)
    if (pl.signed_distance(p) > eps) return false;
  return true;
}

bool pieces_touch(const ConvexPiece& p, const ConvexPiece& q, double eps) {
  for (const auto& v : p.unit_vertices)
    if (inside_all(q.unit_planes, v, eps)) return true;
  for (const auto& v : q.unit_vertices)
    if (inside_all(p.unit_planes, v, eps)) return true;

  std::vector<HalfSpace> all;
  all.reserve(p.unit_planes.size() + q.unit_planes.size());
  for (const auto& pl : p.unit_planes) all.push_back({pl.normal, pl.offset});
  for (const auto& pl : q.unit_planes) all.push_back({pl.normal, pl.offset});
  return !enumerate_vertices(all, eps).empty();
}

}  // namespace

Plane Plane::from_normal_offset(const Eigen::Vector3d& normal, double offset) {
  Plane p;
  p.normal = normal;
  p.offset = offset;
  p.point = normal * offset;
  return p;
}

bool ConvexPiece::contains(const Point3& p_lrf, double eps) const {
  return inside_all(planes, p_lrf, eps);
}

bool BinGeometry::contains(const Point3& p_lrf, double eps) const {
  return std::any_of(pieces.begin(), pieces.end(),
                     [&](const ConvexPiece& piece) { return piece.contains(p_lrf, eps); });
}

int default_p_avg(std::size_t m) {
  if (m < 5000) return 15;
  if (m < 10000) return 39;
  if (m < 100000) return 48;
  if (m < 200000) return 95;
  return 381;
}

DivChoice select_div(std::size_t m, std::optional<int> p_avg_override) {
  DivChoice out;
  out.p_avg = p_avg_override ? *p_avg_override : default_p_avg(m);
  if (out.p_avg < 1)
    throw Error(ErrorCode::InvalidArgument, "p_avg must be positive, got " + std::to_string(out.p_avg));
  const std::size_t per_block = static_cast<std::size_t>(kBlockCount) * static_cast<std::size_t>(out.p_avg);
  const std::size_t div = (m + per_block - 1) / per_block;
  out.div = static_cast<int>(std::max<std::size_t>(div, 1));
  return out;
}

QuadrantInfo quadrant_of(const Point3& p_lrf, const Eigen::Vector3d& half_extents) {
  QuadrantInfo out;
  out.quadrant = (p_lrf.x() < 0.0 ? 1 : 0) + (p_lrf.y() < 0.0 ? 2 : 0) + (p_lrf.z() < 0.0 ? 4 : 0);
  out.vertex = quadrant_signs(out.quadrant).cwiseProduct(half_extents);
  return out;
}

int block_of(const Point3& p, int quadrant, const Point3& v) {
  const double xy = -(v.y() / v.x()) * p.x() + p.y();
  const double xz = -(v.z() / v.x()) * p.x() + p.z();
  const double yz = -(v.z() / v.y()) * p.y() + p.z();
  int b = 3;
  if (xy > 0.0 && xz > 0.0) {
    b = 1;
  } else if (xy <= 0.0 && yz > 0.0) {
    b = 2;
  }
  return 3 * quadrant + b;
}

int proj_of(const Point3& p_lrf, int b, const Eigen::Vector3d& half_extents, int div) {
  const int axis = b - 1;
  const double slice = std::floor(std::abs(p_lrf[axis]) * div / half_extents[axis]);
  const double raw = static_cast<double>(div) - slice;
  return static_cast<int>(std::clamp(raw, 1.0, static_cast<double>(div)));
}

BinIndex hash_lrf(const Eigen::Vector3d& half_extents, int div, const Point3& p_lrf) {
  const QuadrantInfo q = quadrant_of(p_lrf, half_extents);
  const int block = block_of(p_lrf, q.quadrant, q.vertex);
  const int b = block - 3 * q.quadrant;
  return {block, proj_of(p_lrf, b, half_extents, div)};
}

BinIndex hash_point(const ObbFrame& frame, int div, const Point3& p) {
  return hash_lrf(frame.half_extents, div, to_lrf(frame, p));
}

BinGeometry bin_geometry(const ObbFrame& frame, int div, BinIndex bin) {
  if (div < 1 || bin.block < 1 || bin.block > kBlockCount || bin.proj < 1 || bin.proj > div)
    throw Error(ErrorCode::BinOutOfRange, "bin (" + std::to_string(bin.block) + ", " +
                                              std::to_string(bin.proj) + ") with div " +
                                              std::to_string(div));

  const int quadrant = (bin.block - 1) / 3;
  const int b = bin.block - 3 * quadrant;
  const int axis = b - 1;
  const Eigen::Vector3d s = quadrant_signs(quadrant);
  const double lo = static_cast<double>(div - bin.proj) / div;
  const double hi = static_cast<double>(div - bin.proj + 1) / div;
  const Eigen::Vector3d& half = frame.half_extents;

  BinGeometry geo;
  std::vector<std::vector<HalfSpace>> piece_facets;
  for (const auto& wedge : block_wedges(s.y(), s.z(), b)) {
    std::vector<HalfSpace> hs;
    for (const auto& alpha : wedge) hs.push_back(normalized(alpha.cwiseProduct(s), 0.0));
    for (int c = 0; c < 3; ++c) {
      const Eigen::Vector3d e = Eigen::Vector3d::Unit(c) * s[c];
      hs.push_back({-e, 0.0});
      hs.push_back({e, 1.0});
    }
    const Eigen::Vector3d t = Eigen::Vector3d::Unit(axis) * s[axis];
    if (lo > 0.0) hs.push_back({-t, -lo});
    if (hi < 1.0) hs.push_back({t, hi});

    const auto vertices = enumerate_vertices(hs, kLatticeTol);
    if (vertices.size() < 4) continue;

    std::vector<HalfSpace> facets;
    for (const auto& h : hs) {
      if (!is_facet(h, vertices)) continue;
      if (std::none_of(facets.begin(), facets.end(), [&](const HalfSpace& f) { return same_plane(f, h); }))
        facets.push_back(h);
    }

    ConvexPiece piece;
    for (const auto& f : facets) {
      piece.unit_planes.push_back(to_unit_plane(f));
      piece.planes.push_back(to_lrf_plane(f, half));
    }
    for (const auto& v : vertices) {
      piece.unit_vertices.push_back(v);
      piece.vertices.push_back(v.cwiseProduct(half));
    }
    geo.pieces.push_back(std::move(piece));
    piece_facets.push_back(std::move(facets));
  }

  // Boundary planes of the union: drop faces shared (with opposite
  // orientation) between two pieces, and duplicates.
  std::vector<HalfSpace> boundary;
  for (std::size_t i = 0; i < piece_facets.size(); ++i) {
    for (const auto& f : piece_facets[i]) {
      bool internal = false;
      for (std::size_t j = 0; j < piece_facets.size() && !internal; ++j) {
        if (j == i) continue;
        internal = std::any_of(piece_facets[j].begin(), piece_facets[j].end(),
                               [&](const HalfSpace& g) { return opposite_plane(f, g); });
      }
      if (internal) continue;
      if (std::none_of(boundary.begin(), boundary.end(), [&](const HalfSpace& g) { return same_plane(f, g); }))
        boundary.push_back(f);
    }
  }
  for (const auto& f : boundary) geo.planes.push_back(to_lrf_plane(f, half));

  for (const auto& piece : geo.pieces) {
    for (std::size_t k = 0; k < piece.unit_vertices.size(); ++k) {
      const bool seen = std::any_of(geo.vertices.begin(), geo.vertices.end(), [&](const Point3& v) {
        return (v.cwiseQuotient(half) - piece.unit_vertices[k]).norm() < 1e-10;
      });
      if (!seen) geo.vertices.push_back(piece.vertices[k]);
    }
  }
  return geo;
}

std::vector<std::vector<std::uint32_t>> compute_adjacency(std::span<const BinGeometry> geometry,
                                                          double eps_unit) {
  struct Ref {
    std::uint32_t bin;
    const ConvexPiece* piece;
    Eigen::Vector3d lo;
    Eigen::Vector3d hi;
  };
  std::vector<Ref> refs;
  for (std::uint32_t bin = 0; bin < geometry.size(); ++bin) {
    for (const auto& piece : geometry[bin].pieces) {
      Ref r{bin, &piece, Eigen::Vector3d::Constant(1e300), Eigen::Vector3d::Constant(-1e300)};
      for (const auto& v : piece.unit_vertices) {
        r.lo = r.lo.cwiseMin(v);
        r.hi = r.hi.cwiseMax(v);
      }
      r.lo.array() -= eps_unit;
      r.hi.array() += eps_unit;
      refs.push_back(r);
    }
  }
  std::sort(refs.begin(), refs.end(), [](const Ref& a, const Ref& b) {
    if (a.lo.x() != b.lo.x()) return a.lo.x() < b.lo.x();
    return a.bin < b.bin;
  });

  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    for (std::size_t j = i + 1; j < refs.size() && refs[j].lo.x() <= refs[i].hi.x(); ++j) {
      const Ref& a = refs[i];
      const Ref& b = refs[j];
      if (a.bin == b.bin) continue;
      if (a.lo.y() > b.hi.y() || b.lo.y() > a.hi.y() || a.lo.z() > b.hi.z() || b.lo.z() > a.hi.z())
        continue;
      if (pieces_touch(*a.piece, *b.piece, eps_unit))
        edges.emplace_back(std::min(a.bin, b.bin), std::max(a.bin, b.bin));
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::vector<std::vector<std::uint32_t>> adjacency(geometry.size());
  for (const auto& [a, b] : edges) {
    adjacency[a].push_back(b);
    adjacency[b].push_back(a);
  }
  for (auto& list : adjacency) std::sort(list.begin(), list.end());
  return adjacency;
}

HashIndex HashIndex::build(std::shared_ptr<const PointCloud> cloud, BoxMode mode,
                           std::optional<int> p_avg_override) {
  if (!cloud) throw Error(ErrorCode::EmptyCloud, "null point cloud");
  HashIndex index;
  index.frame_ = compute_obb(*cloud, mode);
  const DivChoice choice = select_div(cloud->size(), p_avg_override);
  index.div_ = choice.div;
  index.p_avg_ = choice.p_avg;
  index.cloud_ = std::move(cloud);

  const std::size_t bins = index.bin_count();
  const std::size_t m = index.cloud_->size();
  std::vector<std::uint32_t> slot(m);
  index.bin_offsets_.assign(bins + 1, 0);
  for (std::size_t i = 0; i < m; ++i) {
    slot[i] = index.linear(hash_point(index.frame_, index.div_, (*index.cloud_)[static_cast<PointId>(i)]));
    ++index.bin_offsets_[slot[i] + 1];
  }
  for (std::size_t b = 0; b < bins; ++b) index.bin_offsets_[b + 1] += index.bin_offsets_[b];
  index.bin_ids_.resize(m);
  std::vector<std::uint32_t> cursor(index.bin_offsets_.begin(), index.bin_offsets_.end() - 1);
  for (std::size_t i = 0; i < m; ++i) index.bin_ids_[cursor[slot[i]]++] = static_cast<PointId>(i);

  index.geometry_.reserve(bins);
  for (std::uint32_t b = 0; b < bins; ++b)
    index.geometry_.push_back(bin_geometry(index.frame_, index.div_, index.bin_at(b)));

  const auto adjacency = compute_adjacency(index.geometry_);
  index.adjacency_offsets_.assign(bins + 1, 0);
  for (std::size_t b = 0; b < bins; ++b)
    index.adjacency_offsets_[b + 1] = index.adjacency_offsets_[b] + static_cast<std::uint32_t>(adjacency[b].size());
  index.adjacency_ids_.reserve(index.adjacency_offsets_.back());
  for (const auto& list : adjacency) index.adjacency_ids_.insert(index.adjacency_ids_.end(), list.begin(), list.end());
  return index;
}

std::uint32_t HashIndex::linear(BinIndex bin) const {
  if (bin.block < 1 || bin.block > kBlockCount || bin.proj < 1 || bin.proj > div_)
    throw Error(ErrorCode::BinOutOfRange, "bin (" + std::to_string(bin.block) + ", " +
                                              std::to_string(bin.proj) + ") with div " +
                                              std::to_string(div_));
  return static_cast<std::uint32_t>((bin.block - 1) * div_ + (bin.proj - 1));
}

BinIndex HashIndex::bin_at(std::uint32_t linear) const {
  if (linear >= bin_count())
    throw Error(ErrorCode::BinOutOfRange, "linear bin " + std::to_string(linear));
  return {static_cast<int>(linear / div_) + 1, static_cast<int>(linear % div_) + 1};
}

std::span<const PointId> HashIndex::points_in(std::uint32_t linear) const {
  if (linear >= bin_count())
    throw Error(ErrorCode::BinOutOfRange, "linear bin " + std::to_string(linear));
  return {bin_ids_.data() + bin_offsets_[linear], bin_ids_.data() + bin_offsets_[linear + 1]};
}

std::pair<std::uint32_t, std::uint32_t> HashIndex::block_range(int block) const {
  const std::uint32_t first = linear({block, 1});
  return {first, first + static_cast<std::uint32_t>(div_)};
}

std::span<const std::uint32_t> HashIndex::neighbors(std::uint32_t linear) const {
  if (linear >= bin_count())
    throw Error(ErrorCode::BinOutOfRange, "linear bin " + std::to_string(linear));
  return {adjacency_ids_.data() + adjacency_offsets_[linear],
          adjacency_ids_.data() + adjacency_offsets_[linear + 1]};
}

std::uint32_t HashIndex::home_bin(const Point3& q) const {
  const Point3 local = to_lrf(frame_, q).cwiseMax(-frame_.half_extents).cwiseMin(frame_.half_extents);
  return linear(hash_lrf(frame_.half_extents, div_, local));
}

}  // namespace twollsh
