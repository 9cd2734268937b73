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

#ifndef A2GMAP_PIPELINE_HPP
#define A2GMAP_PIPELINE_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "a2gmap/config.hpp"
#include "a2gmap/error.hpp"

namespace a2gmap {

std::string_view tool_version() noexcept;

// Raised when a stage fails; carries the stage name and the code of the
// error that stopped it.
class StageFailure : public Error {
 public:
  StageFailure(std::string stage, ErrorCode cause, const std::string& what);

  const std::string& stage() const noexcept { return stage_; }
  ErrorCode cause() const noexcept { return cause_; }

 private:
  std::string stage_;
  ErrorCode cause_;
};

struct PipelineResult {
  std::string config_hash;
  std::vector<std::string> stages;                 // stages that ran, in order
  std::vector<std::filesystem::path> artifacts;    // relative to the output directory
};

// Deterministic per-stage seed from the top-level seed.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) noexcept;

// Runs the configured stages in dependency order and writes their artifacts
// to `out_dir`. Output is built in a sibling staging directory and moved in
// only when every stage succeeded; on failure nothing new is left behind.
PipelineResult run_pipeline(const PipelineConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace a2gmap

#endif  // A2GMAP_PIPELINE_HPP
