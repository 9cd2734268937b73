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

#include "a2gmap/geo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "a2gmap/error.hpp"

namespace a2gmap {

bool is_valid(const GeoLocation& loc) noexcept {
  return std::isfinite(loc.lat_deg) && std::isfinite(loc.lon_deg) && std::isfinite(loc.alt_m) &&
         loc.lat_deg >= -90.0 && loc.lat_deg <= 90.0 && loc.lon_deg >= -180.0 &&
         loc.lon_deg <= 180.0 && loc.alt_m >= 0.0;
}

void validate(const GeoLocation& loc) {
  if (!is_valid(loc)) {
    std::ostringstream msg;
    msg << "location (" << loc.lat_deg << ", " << loc.lon_deg << ", " << loc.alt_m
        << ") out of range";
    throw Error(ErrorCode::InvalidLocation, msg.str());
  }
}

double horizontal_distance(const GeoLocation& a, const GeoLocation& b) noexcept {
  const double lat1 = deg2rad(a.lat_deg);
  const double lat2 = deg2rad(b.lat_deg);
  const double s_lat = std::sin(0.5 * (lat2 - lat1));
  const double s_lon = std::sin(0.5 * deg2rad(b.lon_deg - a.lon_deg));
  const double h = s_lat * s_lat + std::cos(lat1) * std::cos(lat2) * s_lon * s_lon;
  return 2.0 * kEarthRadiusM * std::asin(std::sqrt(std::clamp(h, 0.0, 1.0)));
}

double horizontal_distance_arccos(const GeoLocation& a, const GeoLocation& b) noexcept {
  const double lat1 = deg2rad(a.lat_deg);
  const double lat2 = deg2rad(b.lat_deg);
  const double c = std::sin(lat2) * std::sin(lat1) +
                   std::cos(lat2) * std::cos(lat1) * std::cos(deg2rad(a.lon_deg - b.lon_deg));
  return std::acos(std::clamp(c, -1.0, 1.0)) * kEarthRadiusM;
}

double distance_3d(const GeoLocation& a, const GeoLocation& b) noexcept {
  return std::hypot(horizontal_distance(a, b), vertical_distance(a, b));
}

double bearing_deg(const GeoLocation& from, const GeoLocation& to) noexcept {
  const double lat1 = deg2rad(from.lat_deg);
  const double lat2 = deg2rad(to.lat_deg);
  const double dlon = deg2rad(to.lon_deg - from.lon_deg);
  const double y = std::sin(dlon) * std::cos(lat2);
  const double x = std::cos(lat1) * std::sin(lat2) - std::sin(lat1) * std::cos(lat2) * std::cos(dlon);
  double deg = rad2deg(std::atan2(y, x));
  if (deg < 0.0) deg += 360.0;
  if (deg >= 360.0) deg -= 360.0;
  return deg;
}

GeoLocation destination(const GeoLocation& from, double bearing, double distance_m) noexcept {
  const double delta = distance_m / kEarthRadiusM;
  const double theta = deg2rad(bearing);
  const double lat1 = deg2rad(from.lat_deg);
  const double lon1 = deg2rad(from.lon_deg);
  const double lat2 =
      std::asin(std::sin(lat1) * std::cos(delta) + std::cos(lat1) * std::sin(delta) * std::cos(theta));
  const double lon2 =
      lon1 + std::atan2(std::sin(theta) * std::sin(delta) * std::cos(lat1),
                        std::cos(delta) - std::sin(lat1) * std::sin(lat2));
  double lon_deg = rad2deg(lon2);
  if (lon_deg > 180.0) lon_deg -= 360.0;
  if (lon_deg < -180.0) lon_deg += 360.0;
  return {rad2deg(lat2), lon_deg, from.alt_m};
}

UnitVector to_unit_vector(const GeoLocation& loc) noexcept {
  const double lat = deg2rad(loc.lat_deg);
  const double lon = deg2rad(loc.lon_deg);
  return {std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat)};
}

double horizontal_distance(const UnitVector& a, const UnitVector& b) noexcept {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  const double half_chord = 0.5 * std::sqrt(dx * dx + dy * dy + dz * dz);
  return 2.0 * kEarthRadiusM * std::asin(std::min(half_chord, 1.0));
}

LinkGeometry link_geometry(const GeoLocation& bs, const GeoLocation& uav) {
  LinkGeometry g;
  g.d_h = horizontal_distance(bs, uav);
  g.d_v = vertical_distance(bs, uav);
  if (g.d_h < 1e-9 && g.d_v < 1e-9) {
    throw Error(ErrorCode::CoLocated, "base station and UAV positions coincide");
  }
  g.d_3d = std::hypot(g.d_h, g.d_v);
  g.theta_l = std::atan2(g.d_v, g.d_h);
  const double h_sum = bs.alt_m + uav.alt_m;
  g.theta_r = std::atan2(h_sum, g.d_h);
  g.reflected_path_len = std::hypot(g.d_h, h_sum);
  g.azimuth_deg = bearing_deg(bs, uav);
  return g;
}

}  // namespace a2gmap
