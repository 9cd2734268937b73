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

#ifndef A2GMAP_PROPAGATION_HPP
#define A2GMAP_PROPAGATION_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "a2gmap/antenna.hpp"
#include "a2gmap/geo.hpp"

namespace a2gmap {

inline constexpr double kSpeedOfLight = 299792458.0;

struct MeasurementSet;

// Elevation interval [min_deg, max_deg]; pattern lookups outside it are
// clamped onto the nearest bound.
struct ElevationWindow {
  double min_deg = -90.0;
  double max_deg = 90.0;
};

struct PropagationConfig {
  double carrier_hz = 3.51e9;
  double tx_power_dbm = 10.0;
  double epsilon0 = 15.0;  // relative ground permittivity
  AntennaPattern bs_pattern = AntennaPattern::isotropic(1.0);
  AntennaPattern uav_pattern = AntennaPattern::isotropic(1.0);
  double bs_height_m = 10.0;
  // Off switch for the ground ray; the two-ray model then equals free space.
  bool ground_reflection = true;
  std::optional<ElevationWindow> los_window;
  std::optional<ElevationWindow> ground_window;

  double wavelength_m() const noexcept { return kSpeedOfLight / carrier_hz; }
};

// Throws Error(InvalidConfig) on carrier <= 0, epsilon0 <= 1, etc.
void validate(const PropagationConfig& cfg);

// Power ratio received/transmitted and its positive-dB loss form.
// gain_linear is the squared-magnitude expression itself (< 1 at range);
// loss_db = -10 log10(gain_linear).
struct PathLossResult {
  double gain_linear = 0.0;
  double loss_db = 0.0;
};

enum class PathLossModel { TwoRay, FreeSpace };

// Vertical-polarization ground reflection coefficient. theta_r in (0, pi/2].
double reflection_coefficient(double theta_r, double epsilon0);

// Elevation angles (degrees, BS frame) at which both antennas are looked up:
// the direct ray leaves the BS at +/-theta_l, the ground ray at -theta_r.
struct RayAngles {
  double azimuth_deg = 0.0;
  double los_elevation_deg = 0.0;
  double ground_elevation_deg = 0.0;
};
RayAngles ray_angles(const LinkGeometry& g, double h_bs, double h_uav);

// Geometry with delta_tau = 2 pi (r1 + r2 - d_3d) / lambda filled in.
LinkGeometry link_geometry(const PropagationConfig& cfg, const GeoLocation& bs, const GeoLocation& uav);

PathLossResult pathloss_two_ray(const PropagationConfig& cfg, const GeoLocation& bs, const GeoLocation& uav);
PathLossResult pathloss_free_space(const PropagationConfig& cfg, const GeoLocation& bs, const GeoLocation& uav);
PathLossResult pathloss(const PropagationConfig& cfg, const GeoLocation& bs, const GeoLocation& uav,
                        PathLossModel model);

// tx_power_dbm - loss_db; the deterministic part of the received power.
double predict_rsrp(const PropagationConfig& cfg, const GeoLocation& bs, const GeoLocation& uav,
                    PathLossModel model);

struct ShadowingExtraction {
  std::vector<double> w_db;           // NaN where flagged
  std::vector<double> predicted_dbm;  // NaN where flagged
  std::vector<std::uint8_t> flagged;  // 1 when the sample geometry was invalid
  std::size_t flagged_count = 0;
};

// w_i = rsrp_i - (P_tx - loss_db_i). Length and order follow `samples`.
ShadowingExtraction extract_shadowing(const PropagationConfig& cfg, const GeoLocation& bs,
                                      const MeasurementSet& samples, PathLossModel model);

}  // namespace a2gmap

#endif  // A2GMAP_PROPAGATION_HPP
