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

#include "a2gmap/antenna.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>

#include "a2gmap/error.hpp"
#include "a2gmap/geo.hpp"
#include "csv.hpp"

namespace a2gmap {

namespace {

bool strictly_increasing(const std::vector<double>& v) {
  return std::adjacent_find(v.begin(), v.end(), [](double a, double b) { return !(a < b); }) == v.end();
}

double wrap360(double deg) {
  double w = std::fmod(deg, 360.0);
  if (w < 0.0) w += 360.0;
  if (w >= 360.0) w -= 360.0;
  return w;
}

// Lower index and fraction for `x` on a sorted axis, clamped at the ends.
std::pair<std::size_t, double> locate_clamped(const std::vector<double>& axis, double x) {
  if (axis.size() == 1 || x <= axis.front()) return {0, 0.0};
  if (x >= axis.back()) return {axis.size() - 2, 1.0};
  const auto it = std::upper_bound(axis.begin(), axis.end(), x);
  const std::size_t hi = static_cast<std::size_t>(it - axis.begin());
  const std::size_t lo = hi - 1;
  return {lo, (x - axis[lo]) / (axis[hi] - axis[lo])};
}

}  // namespace

PatternGrid::PatternGrid(std::vector<double> azimuth_deg, std::vector<double> elevation_deg,
                         std::vector<double> gain_linear)
    : azimuth_(std::move(azimuth_deg)), elevation_(std::move(elevation_deg)), gain_(std::move(gain_linear)) {
  if (azimuth_.empty() || elevation_.empty()) {
    throw Error(ErrorCode::InvalidPattern, "pattern axes must be non-empty");
  }
  if (!strictly_increasing(azimuth_) || !strictly_increasing(elevation_)) {
    throw Error(ErrorCode::InvalidPattern, "pattern axes must be strictly increasing");
  }
  if (azimuth_.front() < 0.0 || azimuth_.back() >= 360.0) {
    throw Error(ErrorCode::InvalidPattern, "azimuth samples must lie in [0, 360)");
  }
  if (elevation_.front() < -90.0 || elevation_.back() > 90.0) {
    throw Error(ErrorCode::InvalidPattern, "elevation samples must lie in [-90, 90]");
  }
  if (gain_.size() != azimuth_.size() * elevation_.size()) {
    throw Error(ErrorCode::InvalidPattern, "gain matrix does not match axis dimensions");
  }
  for (double g : gain_) {
    if (!std::isfinite(g) || g < 0.0) throw Error(ErrorCode::InvalidPattern, "gains must be finite and >= 0");
  }
}

double PatternGrid::interpolate(double azimuth_deg, double elevation_deg) const {
  const auto [e_lo, e_frac] = locate_clamped(elevation_, elevation_deg);
  const std::size_t e_hi = elevation_.size() == 1 ? 0 : e_lo + 1;

  std::size_t a_lo = 0;
  std::size_t a_hi = 0;
  double a_frac = 0.0;
  const std::size_t n_az = azimuth_.size();
  if (n_az > 1) {
    const double az = wrap360(azimuth_deg);
    if (az >= azimuth_.back() || az < azimuth_.front()) {
      // Seam segment between the last sample and the first one + 360.
      a_lo = n_az - 1;
      a_hi = 0;
      const double span = azimuth_.front() + 360.0 - azimuth_.back();
      const double offset = az >= azimuth_.back() ? az - azimuth_.back() : az + 360.0 - azimuth_.back();
      a_frac = offset / span;
    } else {
      const auto it = std::upper_bound(azimuth_.begin(), azimuth_.end(), az);
      a_hi = static_cast<std::size_t>(it - azimuth_.begin());
      a_lo = a_hi - 1;
      a_frac = (az - azimuth_[a_lo]) / (azimuth_[a_hi] - azimuth_[a_lo]);
    }
  }

  const double g00 = at(a_lo, e_lo);
  const double g01 = at(a_lo, e_hi);
  const double g10 = at(a_hi, e_lo);
  const double g11 = at(a_hi, e_hi);
  const double lo = g00 + (g01 - g00) * e_frac;
  const double hi = g10 + (g11 - g10) * e_frac;
  return lo + (hi - lo) * a_frac;
}

PatternGrid parse_pattern_csv(const std::string& text, const std::string& source_name) {
  std::map<std::pair<double, double>, double> cells;
  bool header_seen = false;
  detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const auto fields = detail::split(line);
    if (!header_seen) {
      if (fields.size() != 3 || fields[0] != "azimuth_deg" || fields[1] != "elevation_deg" ||
          fields[2] != "gain_dbi") {
        throw Error(ErrorCode::SchemaError,
                    source_name + ": line " + std::to_string(line_no) +
                        ": expected header azimuth_deg,elevation_deg,gain_dbi");
      }
      header_seen = true;
      return;
    }
    double az = 0, el = 0, g = 0;
    if (fields.size() != 3 || !detail::parse_double(fields[0], az) || !detail::parse_double(fields[1], el) ||
        !detail::parse_double(fields[2], g)) {
      throw Error(ErrorCode::SchemaError, source_name + ": line " + std::to_string(line_no) + ": malformed row");
    }
    if (!cells.emplace(std::make_pair(az, el), db_to_linear(g)).second) {
      throw Error(ErrorCode::SchemaError,
                  source_name + ": line " + std::to_string(line_no) + ": duplicate (azimuth, elevation)");
    }
  });
  if (cells.empty()) throw Error(ErrorCode::SchemaError, source_name + ": no pattern rows");

  std::set<double> az_set, el_set;
  for (const auto& [key, _] : cells) {
    az_set.insert(key.first);
    el_set.insert(key.second);
  }
  std::vector<double> az(az_set.begin(), az_set.end());
  std::vector<double> el(el_set.begin(), el_set.end());
  if (cells.size() != az.size() * el.size()) {
    throw Error(ErrorCode::SchemaError, source_name + ": pattern rows do not cover a full rectangular grid");
  }
  std::vector<double> gains;
  gains.reserve(cells.size());
  // std::map orders by (azimuth, elevation), i.e. azimuth-major.
  for (const auto& [_, g] : cells) gains.push_back(g);
  return PatternGrid(std::move(az), std::move(el), std::move(gains));
}

PatternGrid load_pattern_csv(const std::filesystem::path& path) {
  return parse_pattern_csv(detail::read_file(path), path.string());
}

AntennaPattern AntennaPattern::measured(PatternGrid grid) { return AntennaPattern(std::move(grid)); }

AntennaPattern AntennaPattern::dipole() { return AntennaPattern(DipolePattern{}); }

AntennaPattern AntennaPattern::isotropic(double gain_linear) {
  if (!std::isfinite(gain_linear) || gain_linear < 0.0) {
    throw Error(ErrorCode::InvalidPattern, "isotropic gain must be finite and >= 0");
  }
  return AntennaPattern(IsotropicPattern{gain_linear});
}

std::string AntennaPattern::kind() const {
  if (std::holds_alternative<PatternGrid>(source_)) return "measured";
  if (std::holds_alternative<DipolePattern>(source_)) return "dipole";
  return "isotropic";
}

double dipole_gain_polar(double polar_deg) noexcept {
  const double t = deg2rad(polar_deg);
  const double s = std::sin(t);
  if (std::abs(s) < 1e-9) return 0.0;
  return std::cos(0.5 * kPi * std::cos(t)) / s;
}

double AntennaPattern::gain(double azimuth_deg, double elevation_deg) const {
  if (!(elevation_deg >= -90.0 && elevation_deg <= 90.0)) {
    throw Error(ErrorCode::ElevationOutOfRange, "elevation " + std::to_string(elevation_deg) + " deg");
  }
  if (const auto* grid = std::get_if<PatternGrid>(&source_)) {
    return grid->interpolate(azimuth_deg, elevation_deg);
  }
  if (std::holds_alternative<DipolePattern>(source_)) {
    return dipole_gain_polar(90.0 - elevation_deg);
  }
  return std::get<IsotropicPattern>(source_).gain_linear;
}

double combined_gain(const AntennaPattern& bs, const AntennaPattern& uav, double azimuth_deg,
                     double elevation_deg) {
  return bs.gain(azimuth_deg, elevation_deg) * uav.gain(azimuth_deg, elevation_deg);
}

double linear_to_db(double gain_linear) noexcept { return 10.0 * std::log10(std::max(gain_linear, 1e-12)); }

double db_to_linear(double db) noexcept { return std::pow(10.0, db / 10.0); }

}  // namespace a2gmap
