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

#include "twollsh/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>
#include <random>

#include "twollsh/error.hpp"
#include "twollsh/io.hpp"

namespace twollsh {
namespace {

using Clock = std::chrono::steady_clock;

// Keeps timed result sizes observable so the timed loops are not elided.
volatile std::size_t benchmark_sink = 0;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string optional_fixed(const std::optional<double>& v) { return v ? fixed(*v) : std::string(); }

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

std::uint64_t fnv_mix(std::uint64_t h, std::uint64_t value, int bytes) {
  for (int i = 0; i < bytes; ++i) {
    h ^= (value >> (8 * i)) & 0xFF;
    h *= kFnvPrime;
  }
  return h;
}

QueryResult run_query(const NeighborStructure& s, const Point3& q, const QueryParam& p, SearchStats* stats) {
  if (p.kind == QueryParam::Kind::K) return s.knn(q, static_cast<std::size_t>(p.value), stats);
  return s.radius(q, p.value, stats);
}

std::vector<QueryParam> params_of(const std::vector<std::size_t>& k_list, const std::vector<double>& r_list) {
  std::vector<QueryParam> out;
  for (const auto k : k_list) out.push_back({QueryParam::Kind::K, static_cast<double>(k)});
  for (const auto r : r_list) out.push_back({QueryParam::Kind::R, r});
  return out;
}

}  // namespace

const char* to_string(StructureKind kind) {
  switch (kind) {
    case StructureKind::TwoLevelLsh: return "2llsh";
    case StructureKind::TwoLevelLshAabb: return "2llsh-aabb";
    case StructureKind::TwoLevelLshNoPrune: return "2llsh-noprune";
    case StructureKind::KdTree: return "kdtree";
    case StructureKind::Octree: return "octree";
    case StructureKind::BruteForce: return "bruteforce";
  }
  return "unknown";
}

StructureKind parse_structure(std::string_view name) {
  for (const auto k : {StructureKind::TwoLevelLsh, StructureKind::TwoLevelLshAabb, StructureKind::TwoLevelLshNoPrune,
                       StructureKind::KdTree, StructureKind::Octree, StructureKind::BruteForce})
    if (name == to_string(k)) return k;
  throw Error(ErrorCode::InvalidArgument, "unknown structure '" + std::string(name) + "'");
}

HashIndexStructure::HashIndexStructure(std::shared_ptr<const PointCloud> cloud, BoxMode mode,
                                       std::optional<int> p_avg, SearchOptions options, std::string name)
    : index_(HashIndex::build(std::move(cloud), mode, p_avg)), options_(options), name_(std::move(name)) {}

QueryResult HashIndexStructure::knn(const Point3& q, std::size_t k, SearchStats* stats) const {
  return twollsh::knn(index_, q, k, options_, stats);
}

QueryResult HashIndexStructure::radius(const Point3& q, double r, SearchStats* stats) const {
  return twollsh::radius(index_, q, r, options_, stats);
}

std::unique_ptr<NeighborStructure> make_structure(StructureKind kind, std::shared_ptr<const PointCloud> cloud,
                                                  const StructureParams& params) {
  switch (kind) {
    case StructureKind::TwoLevelLsh:
      return std::make_unique<HashIndexStructure>(std::move(cloud), BoxMode::OBB, params.p_avg, SearchOptions{},
                                                  to_string(kind));
    case StructureKind::TwoLevelLshAabb:
      return std::make_unique<HashIndexStructure>(std::move(cloud), BoxMode::AABB, params.p_avg, SearchOptions{},
                                                  to_string(kind));
    case StructureKind::TwoLevelLshNoPrune:
      return std::make_unique<HashIndexStructure>(std::move(cloud), BoxMode::OBB, params.p_avg,
                                                  SearchOptions{.pruning = false}, to_string(kind));
    case StructureKind::KdTree:
      return std::make_unique<KdTree>(std::move(cloud));
    case StructureKind::Octree: {
      const int layer = params.layer ? *params.layer : default_octree_layer(cloud->size());
      return std::make_unique<Octree>(std::move(cloud), layer);
    }
    case StructureKind::BruteForce:
      return std::make_unique<BruteForce>(std::move(cloud));
  }
  throw Error(ErrorCode::InvalidArgument, "unknown structure");
}

Model load_model(const std::string& spec) {
  constexpr std::string_view prefix = "synthetic:";
  if (spec.rfind(prefix, 0) == 0) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
      const std::size_t colon = spec.find(':', start);
      parts.push_back(spec.substr(start, colon - start));
      if (colon == std::string::npos) break;
      start = colon + 1;
    }
    if (parts.size() < 3 || parts.size() > 4)
      throw Error(ErrorCode::InvalidArgument, "expected synthetic:<family>:<m>[:<seed>], got '" + spec + "'");
    const ShapeFamily family = parse_shape_family(parts[1]);
    std::size_t m = 0;
    std::uint64_t seed = 1;
    try {
      m = std::stoull(parts[2]);
      if (parts.size() == 4) seed = std::stoull(parts[3]);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "bad synthetic size or seed in '" + spec + "'");
    }
    if (m == 0) throw Error(ErrorCode::EmptyCloud, "synthetic cloud with zero points");
    return {spec, std::make_shared<const PointCloud>(generate_cloud(family, m, seed))};
  }
  const std::filesystem::path path(spec);
  return {path.stem().string(), std::make_shared<const PointCloud>(load_cloud(path))};
}

std::string QueryParam::label() const {
  char buf[64];
  if (kind == Kind::K) {
    std::snprintf(buf, sizeof buf, "k=%zu", static_cast<std::size_t>(value));
  } else {
    std::snprintf(buf, sizeof buf, "r=%g", value);
  }
  return buf;
}

std::vector<Point3> select_queries(const PointCloud& cloud, std::size_t count, std::uint64_t seed,
                                   std::size_t exterior) {
  validate(cloud);
  std::mt19937_64 rng(seed);
  const std::size_t m = cloud.size();
  count = std::min(count, m);

  // Partial Fisher-Yates: the first `count` slots become a uniform sample
  // without replacement.
  std::vector<PointId> ids(m);
  std::iota(ids.begin(), ids.end(), PointId{0});
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, m - 1);
    std::swap(ids[i], ids[pick(rng)]);
  }
  std::vector<Point3> out;
  out.reserve(count + exterior);
  for (std::size_t i = 0; i < count; ++i) out.push_back(cloud[ids[i]]);

  if (exterior > 0) {
    const auto [lo, hi] = cloud.bounds();
    const Point3 center = 0.5 * (lo + hi);
    const double diag = std::max((hi - lo).norm(), 1e-9);
    std::uniform_int_distribution<std::size_t> any(0, m - 1);
    std::normal_distribution<double> jitter(0.0, 0.05 * diag);
    for (std::size_t i = 0; i < exterior; ++i) {
      const Point3& p = cloud[static_cast<PointId>(any(rng))];
      Eigen::Vector3d dir = p - center;
      if (dir.norm() < 1e-12 * diag) dir = Eigen::Vector3d::UnitX();
      const Point3 outside = center + dir.normalized() * (0.5 * diag) * 1.2;
      out.push_back(outside + Eigen::Vector3d(jitter(rng), jitter(rng), jitter(rng)));
    }
  }
  return out;
}

std::uint64_t result_hash(const QueryResult& result) {
  std::uint64_t h = kFnvOffset;
  h = fnv_mix(h, result.hits.size(), 8);
  for (const auto& hit : result.hits) h = fnv_mix(h, hit.id, 4);
  return h;
}

std::vector<BenchRecord> run_bench(const BenchConfig& config, const std::vector<Model>& models) {
  std::vector<StructureKind> order = config.structures;
  // The oracle goes first so every other structure is checked against it.
  std::stable_partition(order.begin(), order.end(), [](StructureKind k) { return k == StructureKind::BruteForce; });
  const auto params = params_of(config.k_list, config.r_list);

  std::vector<BenchRecord> records;
  for (const auto& model : models) {
    const PointCloud& cloud = *model.cloud;
    const auto queries = select_queries(cloud, config.query_count, config.seed, config.exterior_queries);
    // reference[param][query] = hash from the first structure run.
    std::vector<std::vector<std::uint64_t>> reference(params.size());
    std::string reference_name;

    for (const auto kind : order) {
      const auto build_start = Clock::now();
      const auto structure = config.factory ? config.factory(kind, model.cloud, config.params)
                                            : make_structure(kind, model.cloud, config.params);
      const double build_ms = elapsed_ms(build_start);

      for (std::size_t p = 0; p < params.size(); ++p) {
        SearchStats stats;
        std::uint64_t checksum = kFnvOffset;
        const bool is_reference = reference_name.empty();
        for (std::size_t i = 0; i < queries.size(); ++i) {
          const std::uint64_t h = result_hash(run_query(*structure, queries[i], params[p], &stats));
          if (is_reference) {
            reference[p].push_back(h);
          } else if (reference[p][i] != h) {
            throw Error(ErrorCode::ChecksumMismatch, "model '" + model.name + "' query " + std::to_string(i) + " " +
                                                         params[p].label() + ": " + structure->name() +
                                                         " disagrees with " + reference_name);
          }
          checksum = fnv_mix(checksum, h, 8);
        }

        std::size_t sink = 0;
        const auto timed_start = Clock::now();
        for (const auto& q : queries) {
          sink += run_query(*structure, q, params[p], nullptr).hits.size();
        }
        const double query_ms = elapsed_ms(timed_start);
        benchmark_sink = benchmark_sink + sink;

        BenchRecord rec;
        rec.model = model.name;
        rec.m = cloud.size();
        rec.structure = structure->name();
        rec.parameter = params[p].label();
        rec.build_time_ms = build_ms;
        rec.query_time_ms = query_ms;
        rec.mean_visited =
            queries.empty() ? 0.0 : static_cast<double>(stats.cells_visited) / static_cast<double>(queries.size());
        rec.pointer_bytes = structure->pointer_count() * kBytesPerPointer;
        rec.checksum = checksum;
        records.push_back(std::move(rec));
      }
      if (reference_name.empty()) reference_name = structure->name();
    }
  }
  return records;
}

void write_records_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
  out << "model,m,structure,parameter,build_time_ms,query_time_ms,mean_visited,pointer_bytes,checksum\n";
  for (const auto& r : records) {
    char checksum[32];
    std::snprintf(checksum, sizeof checksum, "%016llx", static_cast<unsigned long long>(r.checksum));
    out << r.model << ',' << r.m << ',' << r.structure << ',' << r.parameter << ',' << fixed(r.build_time_ms) << ','
        << fixed(r.query_time_ms) << ',' << fixed(r.mean_visited) << ',' << r.pointer_bytes << ',' << checksum << '\n';
  }
}

double reduct(double t_baseline_ms, double t_lsh_ms) { return (t_baseline_ms - t_lsh_ms) / t_baseline_ms * 100.0; }

std::vector<ReductRow> reduct_table(const std::vector<BenchRecord>& records) {
  std::map<std::pair<std::string, std::string>, const BenchRecord*> by_key;
  auto key = [](const BenchRecord& r, const char* s) { return std::make_pair(r.model + "\x1f" + r.parameter, std::string(s)); };
  for (const auto& r : records) by_key[{r.model + "\x1f" + r.parameter, r.structure}] = &r;

  std::vector<ReductRow> rows;
  for (const auto& r : records) {
    if (r.structure != to_string(StructureKind::TwoLevelLsh)) continue;
    ReductRow row;
    row.model = r.model;
    row.parameter = r.parameter;
    row.t_lsh_ms = r.query_time_ms;
    if (const auto it = by_key.find(key(r, "kdtree")); it != by_key.end()) {
      row.t_kdtree_ms = it->second->query_time_ms;
      row.reduct_1 = reduct(*row.t_kdtree_ms, row.t_lsh_ms);
    }
    if (const auto it = by_key.find(key(r, "octree")); it != by_key.end()) {
      row.t_octree_ms = it->second->query_time_ms;
      row.reduct_2 = reduct(*row.t_octree_ms, row.t_lsh_ms);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_reduct_csv(std::ostream& out, const std::vector<ReductRow>& rows) {
  out << "model,parameter,t_2llsh_ms,t_kdtree_ms,reduct_1_pct,t_octree_ms,reduct_2_pct\n";
  for (const auto& r : rows)
    out << r.model << ',' << r.parameter << ',' << fixed(r.t_lsh_ms) << ',' << optional_fixed(r.t_kdtree_ms) << ','
        << optional_fixed(r.reduct_1) << ',' << optional_fixed(r.t_octree_ms) << ',' << optional_fixed(r.reduct_2)
        << '\n';
}

MemoryReport memory_report(StructureKind structure, std::size_t m, const StructureParams& params) {
  MemoryReport rep;
  rep.structure = structure;
  rep.m = m;
  switch (structure) {
    case StructureKind::TwoLevelLsh:
    case StructureKind::TwoLevelLshAabb:
    case StructureKind::TwoLevelLshNoPrune: {
      const DivChoice choice = select_div(m, params.p_avg);
      rep.parameter = "p_avg=" + std::to_string(choice.p_avg) + " div=" + std::to_string(choice.div);
      rep.pointer_count = static_cast<std::uint64_t>(kBlockCount) * static_cast<std::uint64_t>(choice.div) + m;
      break;
    }
    case StructureKind::KdTree:
      rep.pointer_count = kdtree_pointer_count(m);
      break;
    case StructureKind::Octree: {
      const int layer = params.layer ? *params.layer : default_octree_layer(m);
      rep.parameter = "layer=" + std::to_string(layer);
      rep.pointer_count = octree_pointer_count(layer, m);
      break;
    }
    case StructureKind::BruteForce:
      rep.pointer_count = 0;
      break;
  }
  rep.bytes = rep.pointer_count * kBytesPerPointer;
  return rep;
}

void write_memory_csv(std::ostream& out, const std::vector<MemoryReport>& rows) {
  out << "structure,m,parameter,pointer_count,bytes,kilobytes\n";
  for (const auto& r : rows)
    out << to_string(r.structure) << ',' << r.m << ',' << r.parameter << ',' << r.pointer_count << ',' << r.bytes
        << ',' << fixed(r.kilobytes(), 2) << '\n';
}

std::vector<SweepRow> sweep_p_avg(const Model& model, const std::vector<int>& p_avg_list,
                                  const std::vector<std::size_t>& k_list, const std::vector<double>& r_list,
                                  std::size_t query_count, std::uint64_t seed) {
  const auto queries = select_queries(*model.cloud, query_count, seed);
  const auto params = params_of(k_list, r_list);
  std::vector<SweepRow> rows;
  for (const int p_avg : p_avg_list) {
    const HashIndexStructure s(model.cloud, BoxMode::OBB, p_avg, SearchOptions{}, "2llsh");
    for (const auto& param : params) {
      SearchStats stats;
      for (const auto& q : queries) run_query(s, q, param, &stats);
      const auto start = Clock::now();
      for (const auto& q : queries) run_query(s, q, param, nullptr);
      SweepRow row;
      row.query_time_ms = elapsed_ms(start);
      row.p_avg = p_avg;
      row.div = s.index().div();
      row.parameter = param.label();
      row.mean_bins = queries.empty() ? 0.0 : static_cast<double>(stats.cells_visited) / static_cast<double>(queries.size());
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "p_avg,div,parameter,query_time_ms,mean_bins\n";
  for (const auto& r : rows)
    out << r.p_avg << ',' << r.div << ',' << r.parameter << ',' << fixed(r.query_time_ms) << ',' << fixed(r.mean_bins)
        << '\n';
}

std::vector<ScaleRow> scale_study(const std::vector<std::size_t>& m_list, std::size_t k, double r,
                                  std::size_t query_count, std::uint64_t seed, ShapeFamily family) {
  std::vector<ScaleRow> rows;
  for (const std::size_t m : m_list) {
    auto cloud = std::make_shared<const PointCloud>(generate_cloud(family, m, seed));
    const auto queries = select_queries(*cloud, query_count, seed);
    const HashIndexStructure s(cloud, BoxMode::OBB, std::nullopt, SearchOptions{}, "2llsh");
    for (const auto& q : queries) s.knn(q, k);  // warm-up

    ScaleRow row;
    row.m = m;
    row.p_avg = s.index().p_avg();
    row.div = s.index().div();
    auto start = Clock::now();
    for (const auto& q : queries) s.knn(q, k);
    row.knn_time_ms = elapsed_ms(start);
    start = Clock::now();
    for (const auto& q : queries) s.radius(q, r);
    row.radius_time_ms = elapsed_ms(start);
    rows.push_back(row);
  }
  return rows;
}

void write_scale_csv(std::ostream& out, const std::vector<ScaleRow>& rows) {
  out << "m,p_avg,div,knn_time_ms,radius_time_ms\n";
  for (const auto& r : rows)
    out << r.m << ',' << r.p_avg << ',' << r.div << ',' << fixed(r.knn_time_ms) << ',' << fixed(r.radius_time_ms)
        << '\n';
}

}  // namespace twollsh
