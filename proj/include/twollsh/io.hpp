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

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "twollsh/point_cloud.hpp"
#include "twollsh/result.hpp"

namespace twollsh {

enum class CloudFormat { XYZ, PlyAscii, PlyBinaryLE, OFF };

const char* to_string(CloudFormat format);

using Rgb = std::array<std::uint8_t, 3>;

struct CloudFile {
  std::filesystem::path path;
  CloudFormat format = CloudFormat::XYZ;
  PointCloud cloud;
  std::optional<std::vector<Rgb>> colors;  // PLY red/green/blue, when present
};

// Format from the file's magic line ("ply", "OFF") or, failing that, its
// extension (.xyz, .txt, .pts, .asc).
CloudFormat detect_format(const std::filesystem::path& path);

CloudFile load_cloud_file(const std::filesystem::path& path, std::optional<CloudFormat> format = std::nullopt);
PointCloud load_cloud(const std::filesystem::path& path, std::optional<CloudFormat> format = std::nullopt);

void save_cloud(const PointCloud& cloud, const std::filesystem::path& path, CloudFormat format);

namespace colors {
inline constexpr Rgb kSearch{255, 0, 0};
inline constexpr Rgb kNearest3{0, 0, 255};
inline constexpr Rgb kNearest6{0, 255, 0};
inline constexpr Rgb kOther{255, 165, 0};
inline constexpr Rgb kBackground{180, 180, 180};
}  // namespace colors

struct HighlightCounts {
  std::size_t red = 0;
  std::size_t blue = 0;
  std::size_t green = 0;
  std::size_t orange = 0;
  std::size_t gray = 0;
};

/// Writes an ASCII PLY with per-vertex colour marking a neighbour search.
///
/// The search point is red. Ranks are taken over `knn` with the search point
/// itself removed: ranks 1-3 are blue and 4-6 green. Any other point in
/// either result is orange and everything else gray. When `search_id` is not
/// given, q is appended as an extra red vertex.
HighlightCounts export_highlight(const PointCloud& cloud, const Point3& q, std::optional<PointId> search_id,
                                 const QueryResult& knn, const QueryResult& radius,
                                 const std::filesystem::path& path);

}  // namespace twollsh
