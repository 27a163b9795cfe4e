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

// Command-line front end for the benchmark harness.
//
//   bench run --input synthetic:box:20000 --structures 2llsh,kdtree,octree
//       --k 1..5 --r 2,4,6,8,10 --queries 1000 --seed 1 --out results.csv
//
// Exit codes: 0 success, 2 checksum mismatch, 3 input or argument error.

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "twollsh/bench.hpp"
#include "twollsh/error.hpp"
#include "twollsh/io.hpp"

namespace {

using namespace twollsh;

constexpr int kExitOk = 0;
constexpr int kExitChecksum = 2;
constexpr int kExitInput = 3;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = text.find(sep, start);
    const std::string part = text.substr(start, end == std::string::npos ? std::string::npos : end - start);
    if (!part.empty()) out.push_back(part);
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

template <typename T>
T parse_number(const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw Error(ErrorCode::InvalidArgument, "not a number: '" + text + "'");
  return value;
}

// "1..5" or "1,2,3,20".
std::vector<std::size_t> parse_count_list(const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& item : split(text, ',')) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_number<std::size_t>(item));
      continue;
    }
    const auto lo = parse_number<std::size_t>(item.substr(0, dots));
    const auto hi = parse_number<std::size_t>(item.substr(dots + 2));
    if (hi < lo) throw Error(ErrorCode::InvalidArgument, "empty range '" + item + "'");
    for (auto v = lo; v <= hi; ++v) out.push_back(v);
  }
  return out;
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_number<double>(item));
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (const auto& v : parse_count_list(text)) out.push_back(static_cast<int>(v));
  return out;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::WriteError, "cannot open '" + path + "' for writing");
  return out;
}

// Writes through `write` to `path`, or to stdout when the path is empty.
template <typename Fn>
void emit(const std::string& path, Fn&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  auto out = open_output(path);
  write(out);
  if (!out) throw Error(ErrorCode::WriteError, "failed writing '" + path + "'");
}

StructureParams make_params(int p_avg, int layer) {
  StructureParams params;
  if (p_avg > 0) params.p_avg = p_avg;
  if (layer > 0) params.layer = layer;
  return params;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2L-LSH spatial index benchmark"};
  app.require_subcommand(1);

  // run
  std::vector<std::string> inputs;
  std::string structures = "2llsh,kdtree,octree";
  std::string k_text = "1..5";
  std::string r_text = "2,4,6,8,10";
  std::size_t queries = 1000;
  std::uint64_t seed = 1;
  std::string out_path;
  std::string reduct_path;
  int p_avg = 0;
  int layer = 0;
  std::size_t exterior = 0;
  auto* run = app.add_subcommand("run", "Time structures over k and r sweeps");
  run->add_option("--input", inputs, "Cloud files or synthetic:<family>:<m>[:<seed>]")->required();
  run->add_option("--structures", structures, "Comma list of 2llsh, 2llsh-aabb, 2llsh-noprune, kdtree, octree, "
                                              "bruteforce");
  run->add_option("--k", k_text, "k values, e.g. 1..5 or 1,5,20");
  run->add_option("--r", r_text, "Radius values, comma separated");
  run->add_option("--queries", queries, "Search points per model");
  run->add_option("--seed", seed, "Query selection seed");
  run->add_option("--out", out_path, "Records CSV (stdout when omitted)");
  run->add_option("--reduct-out", reduct_path, "Reduct table CSV");
  run->add_option("--p-avg", p_avg, "Override the points-per-bin target");
  run->add_option("--layer", layer, "Override the octree depth");
  run->add_option("--exterior", exterior, "Extra query points placed outside the cloud");

  // sweep-pavg
  std::string sweep_input;
  std::string sweep_p_text = "5,10,15,20,30,39,48,60,80,95,120,160";
  auto* sweep = app.add_subcommand("sweep-pavg", "Query time as a function of p_avg");
  sweep->add_option("--input", sweep_input, "Cloud file or synthetic spec")->required();
  sweep->add_option("--p-avg", sweep_p_text, "p_avg values");
  sweep->add_option("--k", k_text, "k values");
  sweep->add_option("--r", r_text, "Radius values");
  sweep->add_option("--queries", queries, "Search points");
  sweep->add_option("--seed", seed, "Query selection seed");
  sweep->add_option("--out", out_path, "CSV output (stdout when omitted)");

  // scale
  std::string m_text = "1000,5000,10000,50000,100000";
  std::size_t scale_k = 5;
  double scale_r = 4.0;
  std::string family_name = "box";
  auto* scale = app.add_subcommand("scale", "Query time against cloud size");
  scale->add_option("--m", m_text, "Cloud sizes; a bare --m runs none")->expected(0, 1);
  scale->add_option("--k", scale_k, "k for the kNN column");
  scale->add_option("--r", scale_r, "Radius for the RN column");
  scale->add_option("--family", family_name, "box, shell, ellipsoid, clusters or slab");
  scale->add_option("--queries", queries, "Search points per size");
  scale->add_option("--seed", seed, "Cloud and query seed");
  scale->add_option("--out", out_path, "CSV output (stdout when omitted)");

  // memory
  std::string memory_m_text = "5000,10000,100000,200000,2500000";
  std::string memory_structures = "2llsh,kdtree,octree";
  auto* memory = app.add_subcommand("memory", "Pointer memory model");
  memory->add_option("--m", memory_m_text, "Cloud sizes");
  memory->add_option("--structures", memory_structures, "Structures to account");
  memory->add_option("--p-avg", p_avg, "Override the points-per-bin target");
  memory->add_option("--layer", layer, "Override the octree depth");
  memory->add_option("--out", out_path, "CSV output (stdout when omitted)");

  // highlight
  std::string highlight_input;
  std::size_t q_index = 0;
  std::size_t highlight_k = 6;
  double highlight_r = 4.0;
  auto* highlight = app.add_subcommand("highlight", "Colour a search point and its neighbours");
  highlight->add_option("--input", highlight_input, "Cloud file or synthetic spec")->required();
  highlight->add_option("--q-index", q_index, "Id of the search point")->required();
  highlight->add_option("--k", highlight_k, "Nearest neighbours to colour");
  highlight->add_option("--r", highlight_r, "Radius for the remaining neighbours");
  highlight->add_option("--out", out_path, "PLY output")->required();

  // generate
  std::string gen_family = "box";
  std::size_t gen_m = 10000;
  double gen_span = 100.0;
  std::string gen_format = "xyz";
  auto* generate = app.add_subcommand("generate", "Write a synthetic cloud");
  generate->add_option("--family", gen_family, "box, shell, ellipsoid, clusters or slab");
  generate->add_option("--m", gen_m, "Point count");
  generate->add_option("--seed", seed, "Generator seed");
  generate->add_option("--span", gen_span, "Approximate extent in model units");
  generate->add_option("--format", gen_format, "xyz, ply, ply-binary or off");
  generate->add_option("--out", out_path, "Output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*run) {
      BenchConfig config;
      config.structures.clear();
      for (const auto& name : split(structures, ',')) config.structures.push_back(parse_structure(name));
      config.k_list = parse_count_list(k_text);
      config.r_list = parse_real_list(r_text);
      config.query_count = queries;
      config.seed = seed;
      config.params = make_params(p_avg, layer);
      config.exterior_queries = exterior;
      std::vector<Model> models;
      for (const auto& spec : inputs) models.push_back(load_model(spec));
      const auto records = run_bench(config, models);
      emit(out_path, [&](std::ostream& os) { write_records_csv(os, records); });
      if (!reduct_path.empty())
        emit(reduct_path, [&](std::ostream& os) { write_reduct_csv(os, reduct_table(records)); });
    } else if (*sweep) {
      const Model model = load_model(sweep_input);
      const auto rows =
          sweep_p_avg(model, parse_int_list(sweep_p_text), parse_count_list(k_text), parse_real_list(r_text), queries,
                      seed);
      emit(out_path, [&](std::ostream& os) { write_sweep_csv(os, rows); });
    } else if (*scale) {
      const auto rows = scale_study(parse_count_list(m_text), scale_k, scale_r, queries, seed,
                                    parse_shape_family(family_name));
      emit(out_path, [&](std::ostream& os) { write_scale_csv(os, rows); });
    } else if (*memory) {
      const auto params = make_params(p_avg, layer);
      std::vector<MemoryReport> rows;
      for (const auto& name : split(memory_structures, ',')) {
        const StructureKind kind = parse_structure(name);
        for (const auto m : parse_count_list(memory_m_text)) rows.push_back(memory_report(kind, m, params));
      }
      emit(out_path, [&](std::ostream& os) { write_memory_csv(os, rows); });
    } else if (*highlight) {
      const Model model = load_model(highlight_input);
      if (q_index >= model.cloud->size())
        throw Error(ErrorCode::InvalidArgument, "--q-index " + std::to_string(q_index) + " out of range for " +
                                                    std::to_string(model.cloud->size()) + " points");
      const auto index = HashIndex::build(model.cloud, BoxMode::OBB);
      const Point3 q = (*model.cloud)[static_cast<PointId>(q_index)];
      // One extra neighbour because the search point finds itself first.
      const auto knn_result = knn(index, q, highlight_k + 1);
      const auto radius_result = radius(index, q, highlight_r);
      const auto counts = export_highlight(*model.cloud, q, static_cast<PointId>(q_index), knn_result,
                                           radius_result, out_path);
      std::printf("red=%zu blue=%zu green=%zu orange=%zu gray=%zu\n", counts.red, counts.blue, counts.green,
                  counts.orange, counts.gray);
    } else if (*generate) {
      CloudFormat format;
      if (gen_format == "xyz") format = CloudFormat::XYZ;
      else if (gen_format == "ply") format = CloudFormat::PlyAscii;
      else if (gen_format == "ply-binary") format = CloudFormat::PlyBinaryLE;
      else if (gen_format == "off") format = CloudFormat::OFF;
      else throw Error(ErrorCode::InvalidArgument, "unknown format '" + gen_format + "'");
      if (gen_m == 0) throw Error(ErrorCode::EmptyCloud, "--m must be positive");
      save_cloud(generate_cloud(parse_shape_family(gen_family), gen_m, seed, gen_span), out_path, format);
    }
  } catch (const Error& e) {
    std::cerr << "bench: " << e.what() << '\n';
    return e.code() == ErrorCode::ChecksumMismatch ? kExitChecksum : kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "bench: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitOk;
}
