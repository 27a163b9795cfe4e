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

#include "twollsh/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "twollsh/error.hpp"

namespace twollsh {
namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Sequential line reader that remembers 1-based line numbers and the byte
// offset just past the last line returned.
class LineReader {
 public:
  explicit LineReader(std::string_view text, std::size_t start = 0) : text_(text), pos_(start) {}

  bool next(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    const std::size_t end = text_.find('\n', pos_);
    const std::size_t stop = end == std::string_view::npos ? text_.size() : end;
    line = text_.substr(pos_, stop - pos_);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos_ = end == std::string_view::npos ? text_.size() : end + 1;
    ++line_no_;
    return true;
  }

  std::size_t line_no() const { return line_no_; }
  std::size_t offset() const { return pos_; }

 private:
  std::string_view text_;
  std::size_t pos_;
  std::size_t line_no_ = 0;
};

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  auto is_sep = [](char c) { return c == ' ' || c == '\t' || c == ',' || c == '\r' || c == '\v' || c == '\f'; };
  while (i < line.size()) {
    while (i < line.size() && is_sep(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_sep(line[i])) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::string_view strip_comment(std::string_view line) {
  const std::size_t hash = line.find('#');
  return hash == std::string_view::npos ? line : line.substr(0, hash);
}

double parse_real(std::string_view token, const std::string& where) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw Error(ErrorCode::ParseError, where + ": invalid number '" + std::string(token) + "'");
  if (!std::isfinite(value))
    throw Error(ErrorCode::ParseError, where + ": non-finite coordinate '" + std::string(token) + "'");
  return value;
}

std::string at_line(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

std::string at_offset(const std::filesystem::path& path, std::size_t offset) {
  return path.string() + "@" + std::to_string(offset);
}

PointCloud parse_xyz(std::string_view text, const std::filesystem::path& path) {
  std::vector<Point3> points;
  LineReader reader(text);
  std::string_view line;
  while (reader.next(line)) {
    const auto tokens = split(strip_comment(line));
    if (tokens.empty()) continue;
    const std::string where = at_line(path, reader.line_no());
    if (tokens.size() < 3) throw Error(ErrorCode::ParseError, where + ": expected 3 coordinates");
    points.emplace_back(parse_real(tokens[0], where), parse_real(tokens[1], where), parse_real(tokens[2], where));
  }
  return PointCloud(std::move(points));
}

// ---------------------------------------------------------------------------
// PLY

enum class PlyType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

std::optional<PlyType> ply_type(std::string_view name) {
  if (name == "char" || name == "int8") return PlyType::Int8;
  if (name == "uchar" || name == "uint8") return PlyType::UInt8;
  if (name == "short" || name == "int16") return PlyType::Int16;
  if (name == "ushort" || name == "uint16") return PlyType::UInt16;
  if (name == "int" || name == "int32") return PlyType::Int32;
  if (name == "uint" || name == "uint32") return PlyType::UInt32;
  if (name == "float" || name == "float32") return PlyType::Float32;
  if (name == "double" || name == "float64") return PlyType::Float64;
  return std::nullopt;
}

std::size_t ply_size(PlyType t) {
  switch (t) {
    case PlyType::Int8:
    case PlyType::UInt8: return 1;
    case PlyType::Int16:
    case PlyType::UInt16: return 2;
    case PlyType::Int32:
    case PlyType::UInt32:
    case PlyType::Float32: return 4;
    case PlyType::Float64: return 8;
  }
  return 0;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::Float32;
  bool is_list = false;
  PlyType count_type = PlyType::UInt8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

struct PlyHeader {
  CloudFormat format = CloudFormat::PlyAscii;
  std::vector<PlyElement> elements;
  std::size_t data_offset = 0;
  std::size_t data_line = 0;
};

PlyHeader parse_ply_header(std::string_view text, const std::filesystem::path& path) {
  PlyHeader header;
  LineReader reader(text);
  std::string_view line;
  if (!reader.next(line) || split(line).empty() || split(line)[0] != "ply")
    throw Error(ErrorCode::ParseError, at_line(path, 1) + ": missing 'ply' magic");

  bool have_format = false;
  while (true) {
    if (!reader.next(line)) throw Error(ErrorCode::ParseError, path.string() + ": missing end_header");
    const std::string where = at_line(path, reader.line_no());
    const auto tokens = split(line);
    if (tokens.empty()) continue;
    const std::string_view key = tokens[0];
    if (key == "end_header") break;
    if (key == "comment" || key == "obj_info") continue;
    if (key == "format") {
      if (tokens.size() < 3) throw Error(ErrorCode::ParseError, where + ": malformed format line");
      if (tokens[1] == "ascii") {
        header.format = CloudFormat::PlyAscii;
      } else if (tokens[1] == "binary_little_endian") {
        header.format = CloudFormat::PlyBinaryLE;
      } else {
        throw Error(ErrorCode::UnsupportedFormat, where + ": PLY encoding '" + std::string(tokens[1]) + "'");
      }
      have_format = true;
    } else if (key == "element") {
      if (tokens.size() != 3) throw Error(ErrorCode::ParseError, where + ": malformed element line");
      PlyElement element;
      element.name = std::string(tokens[1]);
      const auto [ptr, ec] = std::from_chars(tokens[2].data(), tokens[2].data() + tokens[2].size(), element.count);
      if (ec != std::errc() || ptr != tokens[2].data() + tokens[2].size())
        throw Error(ErrorCode::ParseError, where + ": bad element count");
      header.elements.push_back(std::move(element));
    } else if (key == "property") {
      if (header.elements.empty()) throw Error(ErrorCode::ParseError, where + ": property before element");
      PlyProperty prop;
      if (tokens.size() == 5 && tokens[1] == "list") {
        const auto ct = ply_type(tokens[2]);
        const auto it = ply_type(tokens[3]);
        if (!ct || !it) throw Error(ErrorCode::ParseError, where + ": unknown list type");
        prop.is_list = true;
        prop.count_type = *ct;
        prop.type = *it;
        prop.name = std::string(tokens[4]);
      } else if (tokens.size() == 3) {
        const auto t = ply_type(tokens[1]);
        if (!t) throw Error(ErrorCode::ParseError, where + ": unknown property type '" + std::string(tokens[1]) + "'");
        prop.type = *t;
        prop.name = std::string(tokens[2]);
      } else {
        throw Error(ErrorCode::ParseError, where + ": malformed property line");
      }
      header.elements.back().properties.push_back(std::move(prop));
    } else {
      throw Error(ErrorCode::ParseError, where + ": unexpected header keyword '" + std::string(key) + "'");
    }
  }
  if (!have_format) throw Error(ErrorCode::ParseError, path.string() + ": missing format line");
  header.data_offset = reader.offset();
  header.data_line = reader.line_no();
  return header;
}

struct VertexLayout {
  int x = -1, y = -1, z = -1, red = -1, green = -1, blue = -1;
};

VertexLayout vertex_layout(const PlyElement& vertex, const std::filesystem::path& path) {
  VertexLayout layout;
  for (std::size_t i = 0; i < vertex.properties.size(); ++i) {
    const auto& p = vertex.properties[i];
    const int idx = static_cast<int>(i);
    if (p.name == "x") layout.x = idx;
    if (p.name == "y") layout.y = idx;
    if (p.name == "z") layout.z = idx;
    if (p.name == "red") layout.red = idx;
    if (p.name == "green") layout.green = idx;
    if (p.name == "blue") layout.blue = idx;
  }
  if (layout.x < 0 || layout.y < 0 || layout.z < 0)
    throw Error(ErrorCode::ParseError, path.string() + ": vertex element lacks x/y/z");
  for (const int idx : {layout.x, layout.y, layout.z}) {
    const auto& p = vertex.properties[static_cast<std::size_t>(idx)];
    if (p.is_list || (p.type != PlyType::Float32 && p.type != PlyType::Float64))
      throw Error(ErrorCode::UnsupportedFormat, path.string() + ": coordinate '" + p.name + "' is not float32/float64");
  }
  return layout;
}

template <typename T>
T load_le(const char* data) {
  T value;
  std::memcpy(&value, data, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    auto* bytes = reinterpret_cast<unsigned char*>(&value);
    std::reverse(bytes, bytes + sizeof(T));
  }
  return value;
}

double read_binary(PlyType t, const char* data) {
  switch (t) {
    case PlyType::Int8: return static_cast<double>(load_le<std::int8_t>(data));
    case PlyType::UInt8: return static_cast<double>(load_le<std::uint8_t>(data));
    case PlyType::Int16: return static_cast<double>(load_le<std::int16_t>(data));
    case PlyType::UInt16: return static_cast<double>(load_le<std::uint16_t>(data));
    case PlyType::Int32: return static_cast<double>(load_le<std::int32_t>(data));
    case PlyType::UInt32: return static_cast<double>(load_le<std::uint32_t>(data));
    case PlyType::Float32: return static_cast<double>(load_le<float>(data));
    case PlyType::Float64: return load_le<double>(data);
  }
  return 0.0;
}

void finish_vertex(const std::vector<double>& values, const VertexLayout& layout, std::vector<Point3>& points,
                   std::vector<Rgb>& colors, const std::string& where) {
  const Point3 p(values[static_cast<std::size_t>(layout.x)], values[static_cast<std::size_t>(layout.y)],
                 values[static_cast<std::size_t>(layout.z)]);
  if (!p.allFinite()) throw Error(ErrorCode::ParseError, where + ": non-finite coordinate");
  points.push_back(p);
  if (layout.red >= 0 && layout.green >= 0 && layout.blue >= 0) {
    auto channel = [&](int idx) {
      return static_cast<std::uint8_t>(std::clamp(values[static_cast<std::size_t>(idx)], 0.0, 255.0));
    };
    colors.push_back({channel(layout.red), channel(layout.green), channel(layout.blue)});
  }
}

void parse_ply(std::string_view text, CloudFile& file) {
  const PlyHeader header = parse_ply_header(text, file.path);
  file.format = header.format;

  const auto vertex_it = std::find_if(header.elements.begin(), header.elements.end(),
                                      [](const PlyElement& e) { return e.name == "vertex"; });
  if (vertex_it == header.elements.end())
    throw Error(ErrorCode::ParseError, file.path.string() + ": no vertex element");
  const VertexLayout layout = vertex_layout(*vertex_it, file.path);

  std::vector<Point3> points;
  std::vector<Rgb> colors;
  points.reserve(vertex_it->count);

  if (header.format == CloudFormat::PlyAscii) {
    LineReader reader(text, header.data_offset);
    std::string_view line;
    std::size_t line_no = header.data_line;
    auto next_record = [&](const PlyElement& e, std::size_t got) {
      while (reader.next(line)) {
        ++line_no;
        if (!split(line).empty()) return;
      }
      throw Error(ErrorCode::CountMismatch, file.path.string() + ": element '" + e.name + "' declares " +
                                                std::to_string(e.count) + " records, found " + std::to_string(got));
    };
    for (const auto& element : header.elements) {
      const bool is_vertex = &element == &*vertex_it;
      for (std::size_t r = 0; r < element.count; ++r) {
        next_record(element, r);
        if (!is_vertex) continue;
        const std::string where = at_line(file.path, line_no);
        const auto tokens = split(line);
        std::vector<double> values(element.properties.size(), 0.0);
        std::size_t t = 0;
        for (std::size_t p = 0; p < element.properties.size(); ++p) {
          const auto& prop = element.properties[p];
          if (t >= tokens.size()) throw Error(ErrorCode::ParseError, where + ": too few values in vertex record");
          if (prop.is_list) {
            const auto n = static_cast<std::size_t>(parse_real(tokens[t++], where));
            t += n;
            continue;
          }
          values[p] = parse_real(tokens[t++], where);
        }
        finish_vertex(values, layout, points, colors, where);
      }
      if (is_vertex) break;
    }
  } else {
    std::size_t pos = header.data_offset;
    auto need = [&](std::size_t bytes, const PlyElement& e, std::size_t got) {
      if (pos + bytes > text.size())
        throw Error(ErrorCode::CountMismatch, at_offset(file.path, pos) + ": element '" + e.name + "' declares " +
                                                  std::to_string(e.count) + " records, found " + std::to_string(got));
    };
    for (const auto& element : header.elements) {
      const bool is_vertex = &element == &*vertex_it;
      std::vector<double> values(element.properties.size(), 0.0);
      for (std::size_t r = 0; r < element.count; ++r) {
        const std::size_t record_start = pos;
        for (std::size_t p = 0; p < element.properties.size(); ++p) {
          const auto& prop = element.properties[p];
          if (prop.is_list) {
            need(ply_size(prop.count_type), element, r);
            const auto n = static_cast<std::size_t>(read_binary(prop.count_type, text.data() + pos));
            pos += ply_size(prop.count_type);
            need(n * ply_size(prop.type), element, r);
            pos += n * ply_size(prop.type);
          } else {
            need(ply_size(prop.type), element, r);
            values[p] = read_binary(prop.type, text.data() + pos);
            pos += ply_size(prop.type);
          }
        }
        if (is_vertex) finish_vertex(values, layout, points, colors, at_offset(file.path, record_start));
      }
      if (is_vertex) break;
    }
  }

  file.cloud = PointCloud(std::move(points));
  if (!colors.empty()) file.colors = std::move(colors);
}

// ---------------------------------------------------------------------------
// OFF

PointCloud parse_off(std::string_view text, const std::filesystem::path& path) {
  LineReader reader(text);
  std::string_view line;
  std::vector<std::string_view> tokens;
  auto next_tokens = [&]() {
    while (reader.next(line)) {
      tokens = split(strip_comment(line));
      if (!tokens.empty()) return true;
    }
    return false;
  };

  if (!next_tokens() || tokens[0].substr(0, 3) != "OFF")
    throw Error(ErrorCode::ParseError, at_line(path, reader.line_no()) + ": missing 'OFF' magic");
  tokens.erase(tokens.begin());
  if (tokens.empty() && !next_tokens())
    throw Error(ErrorCode::ParseError, path.string() + ": missing OFF counts line");
  const std::string where = at_line(path, reader.line_no());
  if (tokens.size() < 1) throw Error(ErrorCode::ParseError, where + ": malformed counts line");
  std::size_t count = 0;
  const auto [ptr, ec] = std::from_chars(tokens[0].data(), tokens[0].data() + tokens[0].size(), count);
  if (ec != std::errc() || ptr != tokens[0].data() + tokens[0].size())
    throw Error(ErrorCode::ParseError, where + ": bad vertex count");

  std::vector<Point3> points;
  points.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (!next_tokens())
      throw Error(ErrorCode::CountMismatch, path.string() + ": header declares " + std::to_string(count) +
                                                " vertices, found " + std::to_string(i));
    const std::string at = at_line(path, reader.line_no());
    if (tokens.size() < 3) throw Error(ErrorCode::ParseError, at + ": expected 3 coordinates");
    points.emplace_back(parse_real(tokens[0], at), parse_real(tokens[1], at), parse_real(tokens[2], at));
  }
  return PointCloud(std::move(points));
}

std::string format_real(double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

void check_stream(const std::ofstream& out, const std::filesystem::path& path) {
  if (!out) throw Error(ErrorCode::WriteError, "failed writing " + path.string());
}

}  // namespace

const char* to_string(CloudFormat format) {
  switch (format) {
    case CloudFormat::XYZ: return "xyz";
    case CloudFormat::PlyAscii: return "ply-ascii";
    case CloudFormat::PlyBinaryLE: return "ply-binary-le";
    case CloudFormat::OFF: return "off";
  }
  return "unknown";
}

CloudFormat detect_format(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  std::string first;
  std::getline(in, first);
  if (!first.empty() && first.back() == '\r') first.pop_back();
  if (first.rfind("ply", 0) == 0) {
    std::string line;
    while (std::getline(in, line)) {
      if (line.rfind("format", 0) == 0) {
        if (line.find("binary_little_endian") != std::string::npos) return CloudFormat::PlyBinaryLE;
        if (line.find("ascii") != std::string::npos) return CloudFormat::PlyAscii;
        throw Error(ErrorCode::UnsupportedFormat, path.string() + ": " + line);
      }
      if (line.rfind("end_header", 0) == 0) break;
    }
    throw Error(ErrorCode::ParseError, path.string() + ": PLY header without format line");
  }
  if (first.rfind("OFF", 0) == 0) return CloudFormat::OFF;

  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".xyz" || ext == ".txt" || ext == ".pts" || ext == ".asc") return CloudFormat::XYZ;
  throw Error(ErrorCode::UnsupportedFormat, "cannot determine the format of " + path.string());
}

CloudFile load_cloud_file(const std::filesystem::path& path, std::optional<CloudFormat> format) {
  CloudFile file;
  file.path = path;
  file.format = format ? *format : detect_format(path);
  const std::string text = read_file(path);
  switch (file.format) {
    case CloudFormat::XYZ:
      file.cloud = parse_xyz(text, path);
      break;
    case CloudFormat::PlyAscii:
    case CloudFormat::PlyBinaryLE:
      parse_ply(text, file);
      break;
    case CloudFormat::OFF:
      file.cloud = parse_off(text, path);
      break;
  }
  if (file.cloud.empty()) throw Error(ErrorCode::EmptyCloud, path.string() + " contains no points");
  return file;
}

PointCloud load_cloud(const std::filesystem::path& path, std::optional<CloudFormat> format) {
  return load_cloud_file(path, format).cloud;
}

void save_cloud(const PointCloud& cloud, const std::filesystem::path& path, CloudFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::WriteError, "cannot open " + path.string() + " for writing");
  const auto points = cloud.points();
  switch (format) {
    case CloudFormat::XYZ:
      for (const auto& p : points)
        out << format_real(p.x()) << ' ' << format_real(p.y()) << ' ' << format_real(p.z()) << '\n';
      break;
    case CloudFormat::OFF:
      out << "OFF\n" << points.size() << " 0 0\n";
      for (const auto& p : points)
        out << format_real(p.x()) << ' ' << format_real(p.y()) << ' ' << format_real(p.z()) << '\n';
      break;
    case CloudFormat::PlyAscii:
    case CloudFormat::PlyBinaryLE: {
      const bool binary = format == CloudFormat::PlyBinaryLE;
      out << "ply\nformat " << (binary ? "binary_little_endian" : "ascii") << " 1.0\n"
          << "element vertex " << points.size() << "\n"
          << "property double x\nproperty double y\nproperty double z\nend_header\n";
      for (const auto& p : points) {
        if (binary) {
          for (int a = 0; a < 3; ++a) {
            double v = p[a];
            if constexpr (std::endian::native == std::endian::big) {
              auto* bytes = reinterpret_cast<unsigned char*>(&v);
              std::reverse(bytes, bytes + sizeof v);
            }
            out.write(reinterpret_cast<const char*>(&v), sizeof v);
          }
        } else {
          out << format_real(p.x()) << ' ' << format_real(p.y()) << ' ' << format_real(p.z()) << '\n';
        }
      }
      break;
    }
  }
  out.flush();
  check_stream(out, path);
}

HighlightCounts export_highlight(const PointCloud& cloud, const Point3& q, std::optional<PointId> search_id,
                                 const QueryResult& knn, const QueryResult& radius,
                                 const std::filesystem::path& path) {
  const std::size_t m = cloud.size();
  if (search_id && *search_id >= m)
    throw Error(ErrorCode::InvalidArgument, "search id " + std::to_string(*search_id) + " outside the cloud");
  std::vector<Rgb> color(m, colors::kBackground);
  auto mark = [&](const QueryResult& result) {
    for (const auto& h : result.hits) {
      if (h.id >= m) throw Error(ErrorCode::InvalidArgument, "result id outside the cloud");
      color[h.id] = colors::kOther;
    }
  };
  mark(knn);
  mark(radius);

  std::size_t rank = 0;
  for (const auto& h : knn.hits) {
    if (search_id && h.id == *search_id) continue;
    if (rank < 3) {
      color[h.id] = colors::kNearest3;
    } else if (rank < 6) {
      color[h.id] = colors::kNearest6;
    }
    ++rank;
  }
  if (search_id) color[*search_id] = colors::kSearch;

  HighlightCounts counts;
  auto tally = [&](const Rgb& c) {
    if (c == colors::kSearch) ++counts.red;
    else if (c == colors::kNearest3) ++counts.blue;
    else if (c == colors::kNearest6) ++counts.green;
    else if (c == colors::kOther) ++counts.orange;
    else ++counts.gray;
  };

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::WriteError, "cannot open " + path.string() + " for writing");
  const std::size_t total = m + (search_id ? 0 : 1);
  out << "ply\nformat ascii 1.0\ncomment neighbour search highlight\nelement vertex " << total << "\n"
      << "property double x\nproperty double y\nproperty double z\n"
      << "property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n";
  auto row = [&](const Point3& p, const Rgb& c) {
    out << format_real(p.x()) << ' ' << format_real(p.y()) << ' ' << format_real(p.z()) << ' ' << int{c[0]} << ' '
        << int{c[1]} << ' ' << int{c[2]} << '\n';
    tally(c);
  };
  for (std::size_t i = 0; i < m; ++i) row(cloud[static_cast<PointId>(i)], color[i]);
  if (!search_id) row(q, colors::kSearch);
  out.flush();
  check_stream(out, path);
  return counts;
}

}  // namespace twollsh
