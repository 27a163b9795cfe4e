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

#include "twollsh/query.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "twollsh/error.hpp"

namespace twollsh {
namespace {

void check_index(const HashIndex& index) {
  if (index.empty()) throw Error(ErrorCode::EmptyIndex, "index holds no points");
}

// Breadth-first bin expansion shared by both query kinds. `admit(bound)`
// decides whether a bin whose lower bound is `bound` must be scanned;
// `scan(bin)` consumes its points.
template <typename Admit, typename Scan>
void expand(const HashIndex& index, const Point3& q, const SearchOptions& options, SearchStats& stats,
            Admit&& admit, Scan&& scan) {
  const Point3 q_lrf = to_lrf(index.frame(), q);
  const double slack = index.eps();
  std::vector<std::uint8_t> visited(index.bin_count(), 0);
  std::vector<std::uint32_t> frontier;
  frontier.reserve(64);

  const std::uint32_t home = index.home_bin(q);
  visited[home] = 1;
  scan(home);
  ++stats.cells_visited;
  frontier.push_back(home);

  for (std::size_t head = 0; head < frontier.size(); ++head) {
    for (const std::uint32_t next : index.neighbors(frontier[head])) {
      if (visited[next]) continue;
      visited[next] = 1;
      double bound = 0.0;
      if (options.pruning) bound = std::max(0.0, min_dist_boun_lrf(index, q_lrf, next) - slack);
      if (!admit(bound)) continue;
      scan(next);
      ++stats.cells_visited;
      frontier.push_back(next);
    }
  }
}

}  // namespace

std::vector<PointId> QueryResult::ids() const {
  std::vector<PointId> out;
  out.reserve(hits.size());
  for (const auto& h : hits) out.push_back(h.id);
  return out;
}

QueryResult KBest::take() {
  QueryResult out;
  out.hits.reserve(heap_.size());
  while (!heap_.empty()) {
    out.hits.push_back(heap_.top());
    heap_.pop();
  }
  std::reverse(out.hits.begin(), out.hits.end());
  return out;
}

void sort_hits(QueryResult& result) { std::sort(result.hits.begin(), result.hits.end(), closer); }

double min_dist_boun_lrf(const HashIndex& index, const Point3& q_lrf, std::uint32_t linear_bin) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& plane : index.geometry(linear_bin).planes) {
    const double dist = std::abs((plane.point - q_lrf).dot(plane.normal)) / plane.normal.norm();
    best = std::min(best, dist);
  }
  return best;
}

double min_dist_boun(const HashIndex& index, const Point3& q, BinIndex bin) {
  check_index(index);
  return min_dist_boun_lrf(index, to_lrf(index.frame(), q), index.linear(bin));
}

QueryResult knn(const HashIndex& index, const Point3& q, std::size_t k, const SearchOptions& options,
                SearchStats* stats) {
  check_index(index);
  if (k == 0) throw Error(ErrorCode::KZero, "k must be at least 1");
  const PointCloud& cloud = index.cloud();
  k = std::min(k, cloud.size());

  SearchStats local;
  KBest best(k);
  expand(
      index, q, options, local,
      [&](double bound) { return !best.full() || bound * bound <= best.worst_squared(); },
      [&](std::uint32_t bin) {
        const auto ids = index.points_in(bin);
        local.points_examined += ids.size();
        for (const PointId id : ids) best.offer(id, squared_distance(cloud[id], q));
      });
  if (stats) *stats += local;
  return best.take();
}

QueryResult radius(const HashIndex& index, const Point3& q, double r, const SearchOptions& options,
                   SearchStats* stats) {
  check_index(index);
  if (!(r > 0.0)) throw Error(ErrorCode::RNonPositive, "radius must be positive");
  const PointCloud& cloud = index.cloud();
  const double r2 = r * r;

  SearchStats local;
  QueryResult out;
  expand(
      index, q, options, local, [&](double bound) { return bound < r; },
      [&](std::uint32_t bin) {
        const auto ids = index.points_in(bin);
        local.points_examined += ids.size();
        for (const PointId id : ids) {
          const double d2 = squared_distance(cloud[id], q);
          if (d2 < r2) out.hits.push_back({id, d2});
        }
      });
  sort_hits(out);
  if (stats) *stats += local;
  return out;
}

}  // namespace twollsh
