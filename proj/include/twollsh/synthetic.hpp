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
#include <string_view>

#include "twollsh/point_cloud.hpp"

namespace twollsh {

// Seeded stand-ins for scanned models, all spanning roughly `span` units.
enum class ShapeFamily { UniformBox, SphereShell, Ellipsoid, GaussianClusters, PlanarSlab };

inline constexpr std::array<ShapeFamily, 5> kAllShapeFamilies{
    ShapeFamily::UniformBox, ShapeFamily::SphereShell, ShapeFamily::Ellipsoid, ShapeFamily::GaussianClusters,
    ShapeFamily::PlanarSlab};

const char* to_string(ShapeFamily family);
ShapeFamily parse_shape_family(std::string_view name);

PointCloud generate_cloud(ShapeFamily family, std::size_t m, std::uint64_t seed, double span = 100.0);

}  // namespace twollsh
