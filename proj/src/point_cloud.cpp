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

#include "twollsh/point_cloud.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "twollsh/error.hpp"

namespace twollsh {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyCloud: return "EmptyCloud";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::BinOutOfRange: return "BinOutOfRange";
    case ErrorCode::EmptyIndex: return "EmptyIndex";
    case ErrorCode::KZero: return "KZero";
    case ErrorCode::RNonPositive: return "RNonPositive";
    case ErrorCode::LayerTooLarge: return "LayerTooLarge";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::WriteError: return "WriteError";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

PointCloud::PointCloud(std::vector<Point3> points) : points_(std::move(points)) {}

std::pair<Point3, Point3> PointCloud::bounds() const {
  Point3 lo = Point3::Constant(std::numeric_limits<double>::infinity());
  Point3 hi = -lo;
  for (const auto& p : points_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return {lo, hi};
}

void validate(const PointCloud& cloud) {
  if (cloud.empty()) throw Error(ErrorCode::EmptyCloud, "point cloud has no points");
  if (cloud.size() > std::numeric_limits<PointId>::max())
    throw Error(ErrorCode::InvalidArgument, "point cloud exceeds 2^32 points");
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!cloud[static_cast<PointId>(i)].allFinite())
      throw Error(ErrorCode::NonFiniteInput, "point " + std::to_string(i) + " is not finite");
  }
}

}  // namespace twollsh
