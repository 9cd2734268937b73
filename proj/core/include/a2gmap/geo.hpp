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

#ifndef A2GMAP_GEO_HPP
#define A2GMAP_GEO_HPP

#include <array>

namespace a2gmap {

// Spherical earth radius used for every horizontal distance [m].
inline constexpr double kEarthRadiusM = 6378137.0;
inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double deg2rad(double deg) noexcept { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) noexcept { return rad * 180.0 / kPi; }

// Latitude/longitude in degrees, altitude in meters above a common flat
// ground plane.
struct GeoLocation {
  double lat_deg = 0.0;
  double lon_deg = 0.0;
  double alt_m = 0.0;

  friend bool operator==(const GeoLocation&, const GeoLocation&) = default;
};

bool is_valid(const GeoLocation& loc) noexcept;

// Throws Error(InvalidLocation) if the triple violates the coordinate ranges.
void validate(const GeoLocation& loc);

// Great-circle distance on the sphere of radius kEarthRadiusM, ignoring
// altitude. Algebraically the arccos (spherical law of cosines) form; it is
// evaluated through the haversine identity so meter-scale separations keep
// full precision.
double horizontal_distance(const GeoLocation& a, const GeoLocation& b) noexcept;

// The same quantity written literally as arccos(...) * A, argument clamped
// to [-1, 1]. Loses precision below ~10 m; kept for cross-checking.
double horizontal_distance_arccos(const GeoLocation& a, const GeoLocation& b) noexcept;

inline double vertical_distance(const GeoLocation& a, const GeoLocation& b) noexcept {
  const double d = a.alt_m - b.alt_m;
  return d < 0.0 ? -d : d;
}

// sqrt(d_h^2 + d_v^2)
double distance_3d(const GeoLocation& a, const GeoLocation& b) noexcept;

// Initial bearing from `from` to `to`, clockwise from north, in [0, 360).
double bearing_deg(const GeoLocation& from, const GeoLocation& to) noexcept;

// Point reached by travelling `distance_m` along a great circle from `from`
// with initial bearing `bearing` (degrees clockwise from north). Altitude is
// carried over unchanged.
GeoLocation destination(const GeoLocation& from, double bearing, double distance_m) noexcept;

// Unit vector on the sphere for fast bulk great-circle distances.
using UnitVector = std::array<double, 3>;
UnitVector to_unit_vector(const GeoLocation& loc) noexcept;

// Great-circle distance from precomputed unit vectors (chord form).
double horizontal_distance(const UnitVector& a, const UnitVector& b) noexcept;

struct LinkGeometry {
  double d_h = 0.0;                 // horizontal distance [m]
  double d_v = 0.0;                 // |h_bs - h_uav| [m]
  double d_3d = 0.0;                // direct slant range [m]
  double theta_l = 0.0;             // elevation of the direct ray [rad], >= 0
  double theta_r = 0.0;             // ground reflection angle [rad]
  double reflected_path_len = 0.0;  // r1 + r2 [m]
  double delta_tau = 0.0;           // phase difference [rad]; filled in by propagation
  double azimuth_deg = 0.0;         // bearing BS -> UAV, clockwise from north
};

// Two-ray geometry between a ground station and a UAV over a flat ground
// plane. The reflected path length comes from the image construction:
// r1 + r2 = sqrt(d_h^2 + (h_bs + h_uav)^2).
// Throws Error(CoLocated) when both d_h and d_v are below 1e-9 m.
LinkGeometry link_geometry(const GeoLocation& bs, const GeoLocation& uav);

}  // namespace a2gmap

#endif  // A2GMAP_GEO_HPP
