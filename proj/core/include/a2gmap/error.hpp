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

#ifndef A2GMAP_ERROR_HPP
#define A2GMAP_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace a2gmap {

enum class ErrorCode {
  // geometry / inputs
  InvalidLocation,
  CoLocated,
  InvalidAngle,
  ElevationOutOfRange,
  InvalidPattern,
  InvalidConfig,
  // data
  SchemaError,
  NonMonotonicTime,
  AlreadyCalibrated,
  TooFewSamples,
  DegenerateStd,
  EmptyBin,
  NoOverlap,
  NoNeighbors,
  InsufficientData,
  InvalidSpec,
  Io,
  // numerics
  InvalidScale,
  FitDiverged,
  SingularSystem,
  FactorizationFailed,
  // pipeline
  StageFailure,
};

// Coarse grouping used for CLI exit codes.
enum class ErrorCategory { Usage, Data, Numerical };

std::string_view to_string(ErrorCode code) noexcept;
ErrorCategory category(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace a2gmap

#endif  // A2GMAP_ERROR_HPP
