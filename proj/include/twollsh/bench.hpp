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

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "twollsh/baselines.hpp"
#include "twollsh/index.hpp"
#include "twollsh/query.hpp"
#include "twollsh/synthetic.hpp"

namespace twollsh {

inline constexpr std::uint64_t kBytesPerPointer = 4;

enum class StructureKind { TwoLevelLsh, TwoLevelLshAabb, TwoLevelLshNoPrune, KdTree, Octree, BruteForce };

const char* to_string(StructureKind kind);
StructureKind parse_structure(std::string_view name);

struct StructureParams {
  std::optional<int> p_avg;
  std::optional<int> layer;
};

/// Hash index behind the common structure interface.
class HashIndexStructure final : public NeighborStructure {
 public:
  HashIndexStructure(std::shared_ptr<const PointCloud> cloud, BoxMode mode, std::optional<int> p_avg,
                     SearchOptions options, std::string name);

  std::string name() const override { return name_; }
  QueryResult knn(const Point3& q, std::size_t k, SearchStats* stats = nullptr) const override;
  QueryResult radius(const Point3& q, double r, SearchStats* stats = nullptr) const override;
  std::uint64_t pointer_count() const override { return index_.pointer_count(); }

  const HashIndex& index() const { return index_; }

 private:
  HashIndex index_;
  SearchOptions options_;
  std::string name_;
};

std::unique_ptr<NeighborStructure> make_structure(StructureKind kind, std::shared_ptr<const PointCloud> cloud,
                                                  const StructureParams& params = {});

using StructureFactory = std::function<std::unique_ptr<NeighborStructure>(
    StructureKind, std::shared_ptr<const PointCloud>, const StructureParams&)>;

// A named cloud under test.
struct Model {
  std::string name;
  std::shared_ptr<const PointCloud> cloud;
};

// "synthetic:<family>:<m>[:<seed>]" or a file path.
Model load_model(const std::string& spec);

struct QueryParam {
  enum class Kind { K, R } kind = Kind::K;
  double value = 1.0;

  std::string label() const;
};

struct BenchConfig {
  std::vector<StructureKind> structures{StructureKind::TwoLevelLsh, StructureKind::KdTree, StructureKind::Octree};
  std::size_t query_count = 1000;
  std::vector<std::size_t> k_list{1, 2, 3, 4, 5};
  std::vector<double> r_list{2, 4, 6, 8, 10};
  StructureParams params;
  std::uint64_t seed = 1;
  std::size_t exterior_queries = 0;
  StructureFactory factory;  // make_structure when empty
};

struct BenchRecord {
  std::string model;
  std::size_t m = 0;
  std::string structure;
  std::string parameter;
  double build_time_ms = 0.0;
  double query_time_ms = 0.0;
  double mean_visited = 0.0;
  std::uint64_t pointer_bytes = 0;
  std::uint64_t checksum = 0;
};

// Query points: `count` distinct cloud points (clamped to m) drawn with the
// seed, followed by `exterior` points pushed outside the cloud's box.
std::vector<Point3> select_queries(const PointCloud& cloud, std::size_t count, std::uint64_t seed,
                                   std::size_t exterior = 0);

// FNV-1a over the ids of one result, in result order.
std::uint64_t result_hash(const QueryResult& result);

/// Runs every structure over every query parameter for each model.
///
/// Each cell is built once, then queried twice: an untimed pass that
/// records per-query result hashes (and doubles as warm-up) and a timed
/// pass. Per-query hashes must match across all structures of a model;
/// the first disagreement throws ChecksumMismatch naming the model,
/// query index and parameter.
std::vector<BenchRecord> run_bench(const BenchConfig& config, const std::vector<Model>& models);

void write_records_csv(std::ostream& out, const std::vector<BenchRecord>& records);

// (t_baseline - t_2llsh) / t_baseline * 100
double reduct(double t_baseline_ms, double t_lsh_ms);

struct ReductRow {
  std::string model;
  std::string parameter;
  double t_lsh_ms = 0.0;
  std::optional<double> t_kdtree_ms;
  std::optional<double> reduct_1;
  std::optional<double> t_octree_ms;
  std::optional<double> reduct_2;
};

std::vector<ReductRow> reduct_table(const std::vector<BenchRecord>& records);
void write_reduct_csv(std::ostream& out, const std::vector<ReductRow>& rows);

struct MemoryReport {
  StructureKind structure = StructureKind::TwoLevelLsh;
  std::size_t m = 0;
  std::string parameter;
  std::uint64_t pointer_count = 0;
  std::uint64_t bytes = 0;

  double kilobytes() const { return static_cast<double>(bytes) / 1024.0; }
};

// Pointer memory at 4 bytes per pointer: 2L-LSH 24 * div + m, Kd-tree
// ~m, Octree sum 8^(i-1) + m.
MemoryReport memory_report(StructureKind structure, std::size_t m, const StructureParams& params = {});
void write_memory_csv(std::ostream& out, const std::vector<MemoryReport>& rows);

struct SweepRow {
  int p_avg = 0;
  int div = 0;
  std::string parameter;
  double query_time_ms = 0.0;
  double mean_bins = 0.0;
};

std::vector<SweepRow> sweep_p_avg(const Model& model, const std::vector<int>& p_avg_list,
                                  const std::vector<std::size_t>& k_list, const std::vector<double>& r_list,
                                  std::size_t query_count, std::uint64_t seed);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

struct ScaleRow {
  std::size_t m = 0;
  int p_avg = 0;
  int div = 0;
  double knn_time_ms = 0.0;
  double radius_time_ms = 0.0;
};

std::vector<ScaleRow> scale_study(const std::vector<std::size_t>& m_list, std::size_t k, double r,
                                  std::size_t query_count, std::uint64_t seed,
                                  ShapeFamily family = ShapeFamily::UniformBox);
void write_scale_csv(std::ostream& out, const std::vector<ScaleRow>& rows);

}  // namespace twollsh
