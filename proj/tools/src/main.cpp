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

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <system_error>

#include <CLI11.hpp>

#include "a2gmap/config.hpp"
#include "a2gmap/error.hpp"
#include "a2gmap/parallel.hpp"
#include "a2gmap/pipeline.hpp"

namespace {

enum ExitCode : int { kOk = 0, kUsage = 2, kData = 3, kNumerical = 4 };

int exit_code_for(a2gmap::ErrorCode code) {
  switch (a2gmap::category(code)) {
    case a2gmap::ErrorCategory::Usage:
      return kUsage;
    case a2gmap::ErrorCategory::Numerical:
      return kNumerical;
    case a2gmap::ErrorCategory::Data:
      break;
  }
  return kData;
}

struct GlobalOptions {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out = "a2gmap-out";
  unsigned threads = 0;
};

int run(const GlobalOptions& opts, const std::string& stage) {
  a2gmap::PipelineConfig cfg;
  if (!opts.config.empty()) cfg = a2gmap::load_config(opts.config);
  if (opts.seed_set) cfg.seed = opts.seed;
  if (stage != "run") cfg.stages = {stage};
  if (opts.threads > 0) a2gmap::set_max_threads(opts.threads);

  const a2gmap::PipelineResult result = a2gmap::run_pipeline(cfg, opts.out);
  std::cout << "config " << result.config_hash << "\n";
  for (const auto& s : result.stages) std::cout << "stage  " << s << "\n";
  for (const auto& a : result.artifacts) {
    std::cout << "wrote  " << (std::filesystem::path(opts.out) / a).generic_string() << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Builds 3D radio maps from aerial RSRP measurements.", "a2gmap"};
  app.set_version_flag("--version", std::string(a2gmap::tool_version()));
  app.require_subcommand(1);

  GlobalOptions opts;
  app.add_option("--config", opts.config, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option_function<std::uint64_t>(
      "--seed", [&](const std::uint64_t& s) { opts.seed = s; opts.seed_set = true; },
      "Overrides the configured seed");
  app.add_option("--out", opts.out, "Output directory")->capture_default_str();
  app.add_option("--threads", opts.threads, "Worker threads (default 1)")->check(CLI::PositiveNumber);

  std::string chosen;
  const auto add = [&](const std::string& name, const std::string& help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    sub->callback([&chosen, name] { chosen = name; });
  };
  add("synth", "Generate a synthetic measurement campaign");
  add("fit", "Compare path-loss models against the measurements");
  add("shadowing", "Extract shadowing and fit per-height statistics");
  add("correlate", "Estimate horizontal and vertical correlation");
  add("variogram", "Empirical and model semivariogram");
  add("krige", "Leave-one-out kriging predictions");
  add("xval", "Cross-validated kriging RMSE");
  add("map", "Kriged radio map on a regular grid");
  add("run", "Run every stage listed in the configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    return run(opts, chosen);
  } catch (const a2gmap::StageFailure& e) {
    std::cerr << "a2gmap: stage " << e.stage() << " failed: " << e.what() << "\n";
    return exit_code_for(e.cause());
  } catch (const a2gmap::Error& e) {
    std::cerr << "a2gmap: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "a2gmap: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "a2gmap: unexpected failure: " << e.what() << "\n";
    return kData;
  }
}
