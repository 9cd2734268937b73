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

#include "a2gmap/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "a2gmap/error.hpp"
#include "csv.hpp"

namespace a2gmap {

std::vector<int> MeasurementSet::flight_ids() const {
  std::vector<int> ids;
  for (const auto& s : samples) {
    if (std::find(ids.begin(), ids.end(), s.flight_id) == ids.end()) ids.push_back(s.flight_id);
  }
  return ids;
}

MeasurementSet MeasurementSet::flight(int flight_id) const {
  MeasurementSet out;
  out.calibrated = calibrated;
  for (const auto& s : samples) {
    if (s.flight_id == flight_id) out.samples.push_back(s);
  }
  return out;
}

std::vector<GeoLocation> MeasurementSet::locations() const {
  std::vector<GeoLocation> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.loc);
  return out;
}

std::vector<double> MeasurementSet::rsrp() const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.rsrp_dbm);
  return out;
}

void append(MeasurementSet& into, const MeasurementSet& other) {
  if (!into.empty() && !other.empty() && into.calibrated != other.calibrated) {
    throw Error(ErrorCode::InvalidConfig, "cannot mix calibrated and uncalibrated measurements");
  }
  if (into.empty()) into.calibrated = other.calibrated;
  into.samples.insert(into.samples.end(), other.samples.begin(), other.samples.end());
}

MeasurementSet parse_measurements(const std::string& text, const FlightInfo& info,
                                  const std::string& source_name) {
  MeasurementSet set;
  bool header_seen = false;
  bool with_truth = false;
  detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const auto fields = detail::split(line);
    const auto where = source_name + ": line " + std::to_string(line_no);
    if (!header_seen) {
      const bool base = fields.size() >= 5 && fields[0] == "t_s" && fields[1] == "lat_deg" &&
                        fields[2] == "lon_deg" && fields[3] == "alt_m" && fields[4] == "rsrp_dbm";
      with_truth = fields.size() == 7 && fields[5] == "true_pl_db" && fields[6] == "true_w_db";
      if (!base || (fields.size() != 5 && !with_truth)) {
        throw Error(ErrorCode::SchemaError, where + ": expected header t_s,lat_deg,lon_deg,alt_m,rsrp_dbm");
      }
      header_seen = true;
      return;
    }
    const std::size_t expected = with_truth ? 7 : 5;
    double v[7] = {};
    if (fields.size() != expected) {
      throw Error(ErrorCode::SchemaError, where + ": expected " + std::to_string(expected) + " fields");
    }
    for (std::size_t k = 0; k < expected; ++k) {
      if (!detail::parse_double(fields[k], v[k]) || !std::isfinite(v[k])) {
        throw Error(ErrorCode::SchemaError, where + ": field " + std::to_string(k + 1) + " is not a number");
      }
    }
    Sample s;
    s.t_s = v[0];
    s.loc = {v[1], v[2], v[3]};
    s.rsrp_dbm = v[4];
    s.flight_id = info.flight_id;
    s.height_label_m = info.height_label_m;
    if (with_truth) {
      s.true_pl_db = v[5];
      s.true_w_db = v[6];
    }
    if (!is_valid(s.loc)) throw Error(ErrorCode::SchemaError, where + ": location out of range");
    if (!set.samples.empty() && !(s.t_s > set.samples.back().t_s)) {
      throw Error(ErrorCode::NonMonotonicTime, where + ": t_s does not increase");
    }
    set.samples.push_back(s);
  });
  if (!header_seen) throw Error(ErrorCode::SchemaError, source_name + ": empty file");
  return set;
}

double modal_altitude(const MeasurementSet& flight) {
  if (flight.empty()) throw Error(ErrorCode::InsufficientData, "empty flight");
  std::map<long long, std::pair<std::size_t, double>> bins;  // bin -> (count, alt sum)
  for (const auto& s : flight.samples) {
    auto& b = bins[static_cast<long long>(std::floor(s.loc.alt_m))];
    ++b.first;
    b.second += s.loc.alt_m;
  }
  auto best = bins.begin();
  for (auto it = bins.begin(); it != bins.end(); ++it) {
    if (it->second.first > best->second.first) best = it;
  }
  return best->second.second / static_cast<double>(best->second.first);
}

MeasurementSet apply_calibration(const MeasurementSet& set, const CalibrationSpec& cal) {
  if (set.calibrated) throw Error(ErrorCode::AlreadyCalibrated, "measurement set is already calibrated");
  if (!std::isfinite(cal.power_offset_db)) throw Error(ErrorCode::InvalidConfig, "power offset must be finite");

  MeasurementSet out;
  out.calibrated = true;
  for (int id : set.flight_ids()) {
    MeasurementSet flight = set.flight(id);
    auto& samples = flight.samples;
    for (auto& s : samples) s.rsrp_dbm += cal.power_offset_db;

    if (cal.altitude_drift == AltitudeDrift::Linear && samples.size() >= 2) {
      const double t0 = samples.front().t_s;
      const double span = samples.back().t_s - t0;
      const double drift = samples.back().loc.alt_m - samples.front().loc.alt_m;
      for (auto& s : samples) {
        s.loc.alt_m = std::max(0.0, s.loc.alt_m - drift * (s.t_s - t0) / span);
      }
    }

    if (cal.trim_takeoff_landing) {
      const double mode = modal_altitude(flight);
      std::erase_if(samples, [&](const Sample& s) { return std::abs(s.loc.alt_m - mode) > cal.trim_tolerance_m; });
    }

    for (const auto& s : samples) {
      if (!(s.rsrp_dbm >= -160.0 && s.rsrp_dbm <= 0.0)) {
        throw Error(ErrorCode::SchemaError, "calibrated RSRP " + std::to_string(s.rsrp_dbm) + " dBm at t_s=" +
                                                std::to_string(s.t_s) + " outside [-160, 0]");
      }
    }
    out.samples.insert(out.samples.end(), samples.begin(), samples.end());
  }
  return out;
}

MeasurementSet load_measurements(const std::filesystem::path& path, const CalibrationSpec& cal,
                                 const FlightInfo& info) {
  return apply_calibration(parse_measurements(detail::read_file(path), info, path.string()), cal);
}

std::string format_measurements(const MeasurementSet& flight, bool with_truth, double subtract_offset_db) {
  std::string out = with_truth ? "t_s,lat_deg,lon_deg,alt_m,rsrp_dbm,true_pl_db,true_w_db\n"
                               : "t_s,lat_deg,lon_deg,alt_m,rsrp_dbm\n";
  using detail::fmt12;
  for (const auto& s : flight.samples) {
    out += fmt12(s.t_s) + ',' + fmt12(s.loc.lat_deg) + ',' + fmt12(s.loc.lon_deg) + ',' + fmt12(s.loc.alt_m) +
           ',' + fmt12(s.rsrp_dbm - subtract_offset_db);
    if (with_truth) {
      out += ',' + fmt12(s.true_pl_db.value_or(0.0)) + ',' + fmt12(s.true_w_db.value_or(0.0));
    }
    out += '\n';
  }
  return out;
}

void write_measurements(const std::filesystem::path& path, const MeasurementSet& flight, bool with_truth,
                        double subtract_offset_db) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::Io, "cannot write " + path.string());
  os << format_measurements(flight, with_truth, subtract_offset_db);
}

}  // namespace a2gmap
