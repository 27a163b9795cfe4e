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

#include "twollsh/index.hpp"
#include "twollsh/result.hpp"

namespace twollsh {

struct SearchOptions {
  // When false every bin bound is treated as zero, so the frontier reaches
  // every bin. Results must not change; only the work counters grow.
  bool pruning = true;
};

/// Lower bound used to admit a bin into the search frontier: the smallest
/// point-to-plane distance from q to the bin's boundary planes,
/// |(p_pla - q') . n| / |n| minimised over the planes, with q' = q in LRF.
double min_dist_boun(const HashIndex& index, const Point3& q, BinIndex bin);
double min_dist_boun_lrf(const HashIndex& index, const Point3& q_lrf, std::uint32_t linear_bin);

/// Exact k nearest neighbours of q, ascending by distance (ties by id).
///
/// The home bin of q is scanned first. Bins are then expanded breadth first
/// over the adjacency graph; a neighbour bin is scanned and enqueued when
/// fewer than k points are known or its bound does not exceed the current
/// k-th distance. Every bin is evaluated at most once.
QueryResult knn(const HashIndex& index, const Point3& q, std::size_t k,
                const SearchOptions& options = {}, SearchStats* stats = nullptr);

/// All points with distance strictly below r, ascending by distance.
QueryResult radius(const HashIndex& index, const Point3& q, double r,
                   const SearchOptions& options = {}, SearchStats* stats = nullptr);

}  // namespace twollsh
