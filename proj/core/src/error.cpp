// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The a2gmap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "a2gmap/error.hpp"

namespace a2gmap {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidLocation: return "InvalidLocation";
    case ErrorCode::CoLocated: return "CoLocated";
    case ErrorCode::InvalidAngle: return "InvalidAngle";
    case ErrorCode::ElevationOutOfRange: return "ElevationOutOfRange";
    case ErrorCode::InvalidPattern: return "InvalidPattern";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::NonMonotonicTime: return "NonMonotonicTime";
    case ErrorCode::AlreadyCalibrated: return "AlreadyCalibrated";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::DegenerateStd: return "DegenerateStd";
    case ErrorCode::EmptyBin: return "EmptyBin";
    case ErrorCode::NoOverlap: return "NoOverlap";
    case ErrorCode::NoNeighbors: return "NoNeighbors";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::Io: return "Io";
    case ErrorCode::InvalidScale: return "InvalidScale";
    case ErrorCode::FitDiverged: return "FitDiverged";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::FactorizationFailed: return "FactorizationFailed";
    case ErrorCode::StageFailure: return "StageFailure";
  }
  return "Unknown";
}

ErrorCategory category(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidSpec:
      return ErrorCategory::Usage;
    case ErrorCode::InvalidScale:
    case ErrorCode::FitDiverged:
    case ErrorCode::SingularSystem:
    case ErrorCode::FactorizationFailed:
      return ErrorCategory::Numerical;
    default:
      return ErrorCategory::Data;
  }
}

}  // namespace a2gmap
