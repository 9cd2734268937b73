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

#ifndef A2GMAP_CONFIG_HPP
#define A2GMAP_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "a2gmap/kriging.hpp"
#include "a2gmap/measurement.hpp"
#include "a2gmap/propagation.hpp"
#include "a2gmap/statistics.hpp"
#include "a2gmap/synth.hpp"

namespace a2gmap {

enum class AntennaKind { Isotropic, Dipole, Measured };

struct AntennaSpec {
  AntennaKind kind = AntennaKind::Dipole;
  double gain_dbi = 0.0;  // isotropic only
  std::string path;       // measured only, relative to the config file
};

struct FlightInput {
  std::string path;
  int flight_id = 0;
  double height_m = 0.0;
};

// Which flights feed a stage, by nominal height. Empty means every flight.
using HeightSelection = std::vector<double>;

struct XvalSettings {
  HeightSelection pool_heights;
  HeightSelection target_heights;  // empty: same as the pool
  std::size_t m = 100;
  std::size_t n0 = 100;
  std::size_t iterations = 1000;
};

struct KrigeSettings {
  HeightSelection pool_heights;
  HeightSelection target_heights;  // empty: same as the pool
};

struct MapSettings {
  HeightSelection pool_heights;
  double step_m = 10.0;               // horizontal node spacing
  std::vector<double> altitudes_m;    // empty: the pool's flight heights
  double margin_m = 0.0;              // grown around the pool's bounding box
};

struct SynthSettings {
  double origin_east_m = 50.0;   // trajectory origin relative to the BS
  double origin_north_m = 50.0;
  ZigzagSpec zigzag{200.0, 200.0, 50.0};
  std::vector<EastNorth> waypoints;
  double sample_spacing_m = 2.0;
  std::vector<double> heights_m = {30.0, 50.0, 70.0, 90.0, 110.0};
  std::map<double, double> height_mean_db;
  double sample_period_s = 1.0;
};

struct PipelineConfig {
  std::uint64_t seed = 1;
  std::vector<std::string> stages;  // empty: every stage

  // measured data; when empty the pipeline works on a synthetic dataset
  std::vector<FlightInput> flights;
  CalibrationSpec calibration;

  // base station and propagation
  double bs_lat_deg = 35.7275;
  double bs_lon_deg = -78.6960;
  double carrier_hz = 3.51e9;
  double tx_power_dbm = 10.0;
  double epsilon0 = 15.0;
  double bs_height_m = 10.0;
  AntennaSpec bs_antenna;
  AntennaSpec uav_antenna;
  PathLossModel model = PathLossModel::TwoRay;
  bool ground_reflection = true;

  // statistics
  int histogram_bins = 50;
  double bin_m = 2.0;
  double dh_max_m = 3.0;
  int random_starts = 10;
  double fixed_a = 0.3;
  CorrelationModel3D correlation;  // used when the correlate stage does not run
  bool use_fitted_model = true;

  // kriging
  double r0_m = 100.0;
  std::size_t m_max = 1000;
  double nugget = 0.0;
  KrigingMode mode = KrigingMode::Rsrp;
  KrigeSettings krige;
  XvalSettings xval;
  MapSettings map;

  SynthSettings synth;

  // Directory relative paths are resolved against; not part of the hash.
  std::filesystem::path base_dir = ".";
};

inline constexpr std::string_view kStageNames[] = {"synth",    "fit",   "shadowing", "correlate",
                                                   "variogram", "krige", "xval",      "map"};

// Parses a JSON document; every key is optional and unknown keys are
// rejected. Throws Error(InvalidConfig).
PipelineConfig parse_config(std::string_view json_text);
// Reads and parses a file; base_dir becomes the file's directory.
PipelineConfig load_config(const std::filesystem::path& path);

// Fully resolved configuration as canonical JSON (sorted keys, defaults
// filled in); hashing it gives the config hash.
std::string canonical_json(const PipelineConfig& cfg);
std::string config_hash(const PipelineConfig& cfg);

// Hex-encoded SHA-256.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

// Builders from the config.
PropagationConfig make_propagation_config(const PipelineConfig& cfg);
GeoLocation base_station(const PipelineConfig& cfg);
TrajectorySpec make_trajectory(const PipelineConfig& cfg);

}  // namespace a2gmap

#endif  // A2GMAP_CONFIG_HPP
