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

#ifndef A2GMAP_MEASUREMENT_HPP
#define A2GMAP_MEASUREMENT_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "a2gmap/geo.hpp"

namespace a2gmap {

struct Sample {
  double t_s = 0.0;  // seconds since flight start
  GeoLocation loc;
  double rsrp_dbm = 0.0;
  int flight_id = 0;
  double height_label_m = 0.0;
  // Ground truth carried by synthetic datasets.
  std::optional<double> true_pl_db;
  std::optional<double> true_w_db;
};

// Time-ordered samples from one or more flights.
struct MeasurementSet {
  std::vector<Sample> samples;
  bool calibrated = false;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
  const Sample& operator[](std::size_t i) const { return samples[i]; }

  std::vector<int> flight_ids() const;
  MeasurementSet flight(int flight_id) const;
  std::vector<GeoLocation> locations() const;
  std::vector<double> rsrp() const;
};

// Appends `other` to `into`; calibration flags must agree.
void append(MeasurementSet& into, const MeasurementSet& other);

enum class AltitudeDrift { None, Linear };

struct CalibrationSpec {
  double power_offset_db = 98.0;
  AltitudeDrift altitude_drift = AltitudeDrift::Linear;
  bool trim_takeoff_landing = true;
  double trim_tolerance_m = 3.0;
};

struct FlightInfo {
  int flight_id = 0;
  double height_label_m = 0.0;
};

// Canonical CSV: header `t_s,lat_deg,lon_deg,alt_m,rsrp_dbm`, optionally
// followed by `true_pl_db,true_w_db`. One file per flight. Values are raw
// (uncalibrated) and the returned set is not marked calibrated.
MeasurementSet parse_measurements(const std::string& text, const FlightInfo& info,
                                  const std::string& source_name = "<memory>");

// Parses then calibrates: rsrp += offset, linear altitude de-drift so the
// final altitude equals the initial one, then take-off/landing trimming.
MeasurementSet load_measurements(const std::filesystem::path& path, const CalibrationSpec& cal,
                                 const FlightInfo& info = {});

// Applies `cal` to every flight in `set`. Refuses an already calibrated set.
MeasurementSet apply_calibration(const MeasurementSet& set, const CalibrationSpec& cal);

// Altitude of the fixed-height leg: the most populated 1 m altitude bin
// (lowest bin wins ties).
double modal_altitude(const MeasurementSet& flight);

// Writes one flight in the canonical schema. When `subtract_offset_db` is
// non-zero it is removed from rsrp, emulating the raw receiver output.
std::string format_measurements(const MeasurementSet& flight, bool with_truth, double subtract_offset_db = 0.0);
void write_measurements(const std::filesystem::path& path, const MeasurementSet& flight, bool with_truth,
                        double subtract_offset_db = 0.0);

}  // namespace a2gmap

#endif  // A2GMAP_MEASUREMENT_HPP
