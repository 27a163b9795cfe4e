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
#include <queue>
#include <vector>

#include "twollsh/point_cloud.hpp"

namespace twollsh {

struct Neighbor {
  PointId id = 0;
  double squared_distance = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

// Ascending by distance, lower id first on ties.
inline bool closer(const Neighbor& a, const Neighbor& b) {
  if (a.squared_distance != b.squared_distance) return a.squared_distance < b.squared_distance;
  return a.id < b.id;
}

struct QueryResult {
  std::vector<Neighbor> hits;

  std::size_t size() const { return hits.size(); }
  bool empty() const { return hits.empty(); }
  std::vector<PointId> ids() const;
};

// Work counters. `cells_visited` is bins for the hash index and tree nodes
// for the baselines.
struct SearchStats {
  std::size_t cells_visited = 0;
  std::size_t points_examined = 0;

  SearchStats& operator+=(const SearchStats& o) {
    cells_visited += o.cells_visited;
    points_examined += o.points_examined;
    return *this;
  }
};

/// The k best candidates seen so far; the current worst is on top.
class KBest {
 public:
  explicit KBest(std::size_t k) : k_(k) {}

  bool full() const { return heap_.size() >= k_; }
  double worst_squared() const { return heap_.top().squared_distance; }

  void offer(PointId id, double d2) {
    const Neighbor n{id, d2};
    if (!full()) {
      heap_.push(n);
    } else if (closer(n, heap_.top())) {
      heap_.pop();
      heap_.push(n);
    }
  }

  QueryResult take();

 private:
  struct Worse {
    bool operator()(const Neighbor& a, const Neighbor& b) const { return closer(a, b); }
  };
  std::size_t k_;
  std::priority_queue<Neighbor, std::vector<Neighbor>, Worse> heap_;
};

void sort_hits(QueryResult& result);

}  // namespace twollsh
