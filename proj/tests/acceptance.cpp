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

// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero when any criterion fails. Optional argument: a directory
// for the CSV/PLY artefacts (defaults to a temporary directory).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "twollsh/bench.hpp"
#include "twollsh/io.hpp"

namespace fs = std::filesystem;
using namespace twollsh;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const char* title, const Outcome& o) {
  std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

template <typename... Args>
std::string format(const char* fmt, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string read_all(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// ---------------------------------------------------------------------------
// Randomised exactness campaign plus the per-build partition/containment
// checks, which run on exactly the same builds.

struct CampaignResult {
  Outcome exactness;
  Outcome invariants;
};

CampaignResult exactness_campaign() {
  constexpr int kClouds = 100;
  constexpr int kQueries = 100;
  constexpr std::size_t kMinM = 100;
  constexpr std::size_t kMaxM = 50000;
  const std::vector<std::size_t> k_list{1, 2, 3, 4, 5, 20, 50};
  // Sparse (often only the query itself) through dense (thousands of hits).
  const std::vector<double> r_list{0.5, 2, 4, 6, 8, 10, 25};

  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> log_m(std::log(double(kMinM)), std::log(double(kMaxM)));
  std::size_t searches = 0, mismatches = 0, builds = 0, partition_failures = 0, containment_failures = 0;
  std::size_t points_checked = 0, exterior = 0, min_m = kMaxM, max_m = 0;
  std::set<std::string> families;
  std::string first_mismatch;

  for (int c = 0; c < kClouds; ++c) {
    const auto family = kAllShapeFamilies[static_cast<std::size_t>(c) % kAllShapeFamilies.size()];
    std::size_t m = static_cast<std::size_t>(std::exp(log_m(rng)));
    if (c == 0) m = kMinM;
    if (c == 1) m = kMaxM;
    m = std::clamp(m, kMinM, kMaxM);
    min_m = std::min(min_m, m);
    max_m = std::max(max_m, m);
    families.insert(to_string(family));

    const auto cloud = std::make_shared<const PointCloud>(generate_cloud(family, m, 1000 + c));
    const HashIndex index = HashIndex::build(cloud);
    ++builds;

    // Partition: every id exactly once; containment: inside own bin region.
    std::vector<std::uint8_t> seen(m, 0);
    bool partition_ok = true, containment_ok = true;
    for (std::uint32_t lin = 0; lin < index.bin_count(); ++lin) {
      for (const PointId id : index.points_in(lin)) {
        if (seen[id]++) partition_ok = false;
        if (!index.geometry(lin).contains(to_lrf(index.frame(), (*cloud)[id]), index.eps())) containment_ok = false;
        ++points_checked;
      }
    }
    partition_ok = partition_ok && std::all_of(seen.begin(), seen.end(), [](std::uint8_t s) { return s == 1; });
    partition_failures += !partition_ok;
    containment_failures += !containment_ok;

    // Queries: 80 cloud points and 20 jittered points outside the cloud.
    const auto queries = select_queries(*cloud, kQueries - 20, 77 + c, 20);
    const auto [lo, hi] = cloud->bounds();
    for (const auto& q : queries) {
      exterior += (q.array() < lo.array()).any() || (q.array() > hi.array()).any();
      const auto truth = testing::ranked(*cloud, q);
      for (const auto k : k_list) {
        ++searches;
        if (knn(index, q, k).ids() != testing::knn_ids_from(truth, k)) {
          if (mismatches++ == 0) first_mismatch = format("%s m=%zu k=%zu", to_string(family), m, k);
        }
      }
      for (const auto r : r_list) {
        ++searches;
        if (radius(index, q, r).ids() != testing::radius_ids_from(truth, r)) {
          if (mismatches++ == 0) first_mismatch = format("%s m=%zu r=%g", to_string(family), m, r);
        }
      }
    }
  }
  const double elapsed = seconds_since(t0);

  CampaignResult out;
  out.exactness.pass = mismatches == 0 && elapsed < 300.0 && families.size() == 5;
  out.exactness.detail = format("%d clouds, %zu families, m in [%zu, %zu], %zu searches (%zu exterior queries), "
                                "%zu mismatches, %.1f s",
                                kClouds, families.size(), min_m, max_m, searches, exterior, mismatches, elapsed);
  if (mismatches) out.exactness.detail += "; first: " + first_mismatch;
  out.invariants.pass = partition_failures == 0 && containment_failures == 0;
  out.invariants.detail = format("%zu builds, %zu points; partition failures %zu, containment failures %zu", builds,
                                 points_checked, partition_failures, containment_failures);
  return out;
}

// ---------------------------------------------------------------------------

Outcome bound_validity() {
  struct Setup {
    ShapeFamily family;
    std::size_t m;
    int p_avg;
  };
  // Small div keeps the per-bin sample sets large; anisotropic families give
  // skewed boxes.
  const std::vector<Setup> setups{{ShapeFamily::UniformBox, 720, 15},
                                  {ShapeFamily::Ellipsoid, 1440, 30},
                                  {ShapeFamily::PlanarSlab, 2000, 30},
                                  {ShapeFamily::GaussianClusters, 2160, 30},
                                  {ShapeFamily::SphereShell, 1000, 42}};
  constexpr std::size_t kSamplesPerBin = 10000;
  constexpr int kPairs = 10000;

  std::mt19937_64 rng(4242);
  int pairs = 0, violations = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < setups.size(); ++s) {
    const auto& setup = setups[s];
    const HashIndex index = HashIndex::build(
        std::make_shared<const PointCloud>(generate_cloud(setup.family, setup.m, 90 + s)), BoxMode::OBB, setup.p_avg);
    const auto& h = index.frame().half_extents;
    const double diag = index.frame().diagonal();

    // Region samples per bin, by rejection from the box through the hash.
    std::vector<std::vector<Point3>> samples(index.bin_count());
    std::uniform_real_distribution<double> u(-1, 1);
    std::size_t full = 0;
    for (std::size_t draw = 0; full < index.bin_count() && draw < 400'000'000; ++draw) {
      const Point3 p(u(rng) * h.x(), u(rng) * h.y(), u(rng) * h.z());
      auto& bucket = samples[index.linear(hash_lrf(h, index.div(), p))];
      if (bucket.size() < kSamplesPerBin) {
        bucket.push_back(p);
        full += bucket.size() == kSamplesPerBin;
      }
    }

    const int share = kPairs / static_cast<int>(setups.size());
    std::uniform_real_distribution<double> wide(-1.6, 1.6);
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(index.bin_count() - 1));
    for (int i = 0; i < share;) {
      const Point3 q(wide(rng) * h.x(), wide(rng) * h.y(), wide(rng) * h.z());
      const std::uint32_t bin = pick(rng);
      const bool in_box = (q.cwiseAbs().array() <= h.array()).all();
      if (in_box && index.linear(hash_lrf(h, index.div(), q)) == bin) continue;  // q inside the bin
      double nearest = std::numeric_limits<double>::infinity();
      for (const auto& p : samples[bin]) nearest = std::min(nearest, (p - q).norm());
      const double excess = (min_dist_boun_lrf(index, q, bin) - nearest) / diag;
      worst = std::max(worst, excess);
      violations += excess > 1e-6;
      ++pairs;
      ++i;
    }
  }
  return {violations == 0 && pairs >= kPairs,
          format("%d (q, bin) pairs, %d violations, largest (bound - sampled distance) / diag = %.3g", pairs,
                 violations, worst)};
}

// ---------------------------------------------------------------------------

Outcome memory_model() {
  struct Cell {
    std::size_t m;
    double lsh, kd, oct;
    int layer;
  };
  // The 200K octree cell only matches depth 7 (the size table puts 200K at 8).
  const std::vector<Cell> cells{{5000, 20.51, 19.53, 21.82, 4},
                                {10000, 40.63, 39.06, 185.35, 6},
                                {100000, 403.65, 390.63, 1560.91, 7},
                                {200000, 790.44, 781.25, 1951.54, 7},
                                {2500000, 9880.51, 9765.63, 19127.91, 8}};
  int exact = 0, lsh_ok = 0;
  double worst_lsh = 0.0;
  for (const auto& c : cells) {
    const double kd = memory_report(StructureKind::KdTree, c.m).kilobytes();
    const double oct = memory_report(StructureKind::Octree, c.m, {.layer = c.layer}).kilobytes();
    exact += std::round(kd * 100) / 100 == c.kd;
    exact += std::round(oct * 100) / 100 == c.oct;
    const double lsh = memory_report(StructureKind::TwoLevelLsh, c.m).kilobytes();
    const double rel = std::abs(lsh - c.lsh) / c.lsh;
    worst_lsh = std::max(worst_lsh, rel);
    lsh_ok += rel <= 0.05;
  }
  return {exact == 10 && lsh_ok == 5,
          format("%d/10 tree cells exact to 0.01 KB; 2L-LSH cells within 5%%: %d/5 (worst %.2f%%)", exact, lsh_ok,
                 100 * worst_lsh)};
}

Outcome parameter_law() {
  const std::vector<std::pair<std::size_t, int>> buckets{{4999, 15}, {5000, 39}, {10000, 48}, {100000, 95},
                                                         {200000, 381}};
  int bad = 0;
  auto check = [&](std::size_t m) {
    const DivChoice c = select_div(m);
    const int expected_p = m < 5000 ? 15 : m < 10000 ? 39 : m < 100000 ? 48 : m < 200000 ? 95 : 381;
    const std::size_t cap = 24 * static_cast<std::size_t>(expected_p);
    const auto expected_div = std::max<std::size_t>(1, (m + cap - 1) / cap);
    bad += c.p_avg != expected_p || static_cast<std::size_t>(c.div) != expected_div;
  };
  for (const auto& [m, p] : buckets) check(m);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> pick(1, 5'000'000);
  for (int i = 0; i < 1000; ++i) check(pick(rng));
  bad += select_div(9360, 39).div != 10;
  bad += select_div(13037).div != 12;
  return {bad == 0, format("5 buckets + 1000 random sizes + 2 worked examples, %d disagreements", bad)};
}

Outcome reduct_arithmetic() {
  // (lsh, kd, reduct_1, octree, reduct_2)
  const std::vector<std::array<double, 5>> rows{
      {204, 363, 43.802, 469, 56.503},   {181, 363, 50.138, 485, 62.680},   {197, 352, 44.034, 491, 59.878},
      {189, 352, 46.307, 486, 61.111},   {190, 351, 45.869, 511, 62.818},   {85, 130, 34.615, 280, 69.643},
      {83, 126, 34.127, 299, 72.241},    {82, 132, 37.879, 313, 73.802},    {88, 135, 34.815, 299, 70.569},
      {85, 134, 36.567, 306, 72.222},    {222, 425, 47.765, 554, 59.928},   {220, 425, 48.235, 589, 62.649},
      {222, 424, 47.642, 615, 63.902},   {221, 434, 49.078, 589, 62.479},   {221, 430, 48.605, 611, 63.830},
      {78, 94, 17.021, 513, 84.795},     {87, 91, 4.396, 559, 84.436},      {75, 84, 10.714, 417, 82.014},
      {67, 125, 46.400, 404, 83.416},    {72, 137, 47.445, 415, 82.651},    {54, 97, 44.330, 597, 90.955},
      {59, 87, 32.184, 603, 90.216},     {44, 69, 36.232, 491, 91.039},     {40, 79, 49.367, 464, 91.379},
      {45, 81, 44.444, 521, 91.363},     {34, 43, 20.930, 378, 91.005},     {33, 46, 28.261, 565, 94.159},
      {46, 56, 17.857, 453, 89.845},     {33, 43, 23.256, 409, 91.932},     {31, 41, 24.390, 438, 92.922},
      {20, 25, 20.000, 71, 71.831},      {22, 45, 51.111, 116, 81.034},     {20, 31, 35.484, 95, 78.947},
      {27, 34, 20.588, 87, 68.966},      {24, 41, 41.463, 117, 79.487},     {52, 73, 28.767, 205, 74.634},
      {67, 78, 14.103, 243, 72.428},     {50, 63, 20.635, 238, 78.992},     {67, 103, 34.951, 254, 73.622},
      {48, 68, 29.412, 211, 77.251},     {83, 161, 48.447, 304, 72.697},    {105, 169, 37.870, 338, 68.935},
      {127, 156, 18.590, 260, 51.154},   {72, 119, 39.496, 233, 69.099},    {75, 126, 40.476, 253, 70.356},
      {1228, 2700, 54.519, 1643, 25.259}, {1479, 2907, 49.123, 2543, 41.840}, {1698, 3056, 44.437, 2712, 37.389},
      {1967, 3165, 37.852, 2772, 29.040}, {2257, 3291, 31.419, 2941, 23.257}};
  int ok = 0;
  for (const auto& r : rows) {
    const double r1 = std::round(reduct(r[1], r[0]) * 1000) / 1000;
    const double r2 = std::round(reduct(r[3], r[0]) * 1000) / 1000;
    ok += std::abs(r1 - r[2]) < 1e-9 && std::abs(r2 - r[4]) < 1e-9;
  }
  return {ok == static_cast<int>(rows.size()), format("%d/%zu rows reproduce both percentages to 3 decimals", ok,
                                                      rows.size())};
}

// ---------------------------------------------------------------------------

Outcome speed_self_consistency(const fs::path& out_dir) {
  std::vector<Model> models;
  for (const char* spec : {"synthetic:ellipsoid:8000:3", "synthetic:clusters:20000:4", "synthetic:shell:12000:5",
                           "synthetic:slab:6000:6", "synthetic:box:30000:7"})
    models.push_back(load_model(spec));

  // (a) Table-shaped output under the reference protocol.
  BenchConfig config;  // 1000 queries, k = 1..5, r = 2..10
  config.structures = {StructureKind::TwoLevelLsh, StructureKind::KdTree, StructureKind::Octree};
  const auto records = run_bench(config, models);
  const auto table = reduct_table(records);
  {
    std::ofstream csv(out_dir / "knn_rn_times.csv");
    write_records_csv(csv, records);
    std::ofstream red(out_dir / "reduct.csv");
    write_reduct_csv(red, table);
  }
  const bool shaped = records.size() == models.size() * 3 * 10 && table.size() == models.size() * 10 &&
                      std::all_of(table.begin(), table.end(),
                                  [](const ReductRow& r) { return r.reduct_1.has_value() && r.reduct_2.has_value(); });

  // (b) Pruning never scans more bins than exhaustive expansion.
  BenchConfig pair = config;
  pair.structures = {StructureKind::TwoLevelLsh, StructureKind::TwoLevelLshNoPrune};
  pair.query_count = 200;
  std::map<std::pair<std::string, std::string>, std::array<double, 2>> visited;
  for (const auto& r : run_bench(pair, models))
    visited[{r.model, r.parameter}][r.structure == "2llsh" ? 0 : 1] = r.mean_visited;
  int monotone = 0;
  double mean_ratio = 0;
  for (const auto& [key, v] : visited) {
    monotone += v[1] >= v[0];
    mean_ratio += v[0] / v[1];
  }
  mean_ratio /= static_cast<double>(visited.size());

  // (c) p_avg sweep on a cloud in the 5K-10K bucket; best of three timings.
  const Model sweep_model = load_model("synthetic:ellipsoid:8000:11");
  const std::vector<int> p_list{5, 10, 15, 20, 30, 39, 48, 60, 80, 120, 200, 333};
  std::map<int, double> best;
  std::vector<SweepRow> last;
  for (int rep = 0; rep < 3; ++rep) {
    last = sweep_p_avg(sweep_model, p_list, {1, 2, 3, 4, 5}, {2, 4, 6, 8, 10}, 1000, 21);
    std::map<int, double> total;
    for (const auto& row : last) total[row.p_avg] += row.query_time_ms;
    for (const auto& [p, t] : total) best[p] = rep == 0 ? t : std::min(best[p], t);
  }
  {
    std::ofstream csv(out_dir / "sweep_pavg.csv");
    write_sweep_csv(csv, last);
  }
  const auto min_it = std::min_element(best.begin(), best.end(),
                                       [](const auto& a, const auto& b) { return a.second < b.second; });
  const double ratio = best.at(39) / min_it->second;
  const bool basin = ratio <= 2.0 && best.at(p_list.front()) > min_it->second;

  std::string curve;
  for (const auto& [p, t] : best) curve += format("%d:%.0f ", p, t);
  return {shaped && monotone == static_cast<int>(visited.size()) && basin,
          format("(a) %zu records, %zu reduct rows%s; (b) pruned <= unpruned bins in %d/%zu cells, mean ratio %.2f; "
                 "(c) sweep minimum at p_avg=%d, p_avg=39 at %.2fx of it [ms: %s]",
                 records.size(), table.size(), shaped ? "" : " (unexpected shape)", monotone, visited.size(),
                 mean_ratio, min_it->first, ratio, curve.c_str())};
}

Outcome determinism(const fs::path& out_dir) {
  const std::vector<Model> models{load_model("synthetic:clusters:6000:2"), load_model("synthetic:slab:3000:3")};
  BenchConfig config;
  config.structures = {StructureKind::TwoLevelLsh, StructureKind::KdTree, StructureKind::Octree,
                       StructureKind::BruteForce};
  config.query_count = 300;
  config.seed = 99;
  config.exterior_queries = 20;

  auto strip_timing = [](const std::string& csv) {
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line)) {
      std::vector<std::string> cells;
      std::string cell;
      std::istringstream ls(line);
      while (std::getline(ls, cell, ',')) cells.push_back(cell);
      for (std::size_t i = 0; i < cells.size(); ++i)
        if (i != 4 && i != 5) out += cells[i] + ',';
      out += '\n';
    }
    return out;
  };
  std::string csv[2];
  std::string ply[2];
  for (int run = 0; run < 2; ++run) {
    std::ostringstream os;
    write_records_csv(os, run_bench(config, models));
    csv[run] = strip_timing(os.str());

    const auto& cloud = *models[0].cloud;
    const HashIndex index = HashIndex::build(models[0].cloud);
    const PointId q_id = 1234;
    const Point3 q = cloud[q_id];
    const fs::path path = out_dir / format("highlight_%d.ply", run);
    export_highlight(cloud, q, q_id, knn(index, q, 21), radius(index, q, 3.0), path);
    ply[run] = read_all(path);
  }
  const bool same_csv = csv[0] == csv[1] && !csv[0].empty();
  const bool same_ply = ply[0] == ply[1] && !ply[0].empty();
  return {same_csv && same_ply, format("records CSV (timing columns removed) %s, %zu bytes; highlight PLY %s, %zu bytes",
                                       same_csv ? "identical" : "differs", csv[0].size(),
                                       same_ply ? "identical" : "differs", ply[0].size())};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path out_dir = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "twollsh_acceptance";
  fs::create_directories(out_dir);

  const auto campaign = exactness_campaign();
  report(1, "exactness against linear scan", campaign.exactness);
  report(2, "pruning bound validity", bound_validity());
  report(3, "pointer memory model", memory_model());
  report(4, "div selection law", parameter_law());
  report(5, "reduct arithmetic", reduct_arithmetic());
  report(6, "speed self-consistency", speed_self_consistency(out_dir));
  report(7, "determinism", determinism(out_dir));
  report(8, "partition and bin containment", campaign.invariants);

  std::printf("%s: %d of 8 criteria failed (artefacts in %s)\n", failures ? "FAIL" : "PASS", failures,
              out_dir.string().c_str());
  return failures ? 1 : 0;
}
