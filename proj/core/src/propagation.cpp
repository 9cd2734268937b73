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

#include "a2gmap/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "a2gmap/error.hpp"
#include "a2gmap/measurement.hpp"

namespace a2gmap {

namespace {

double apply_window(const std::optional<ElevationWindow>& window, double elevation_deg) {
  if (!window) return elevation_deg;
  return std::clamp(elevation_deg, window->min_deg, window->max_deg);
}

PathLossResult from_gain(double gain_linear) {
  if (!(gain_linear > 0.0) || !std::isfinite(gain_linear)) {
    // Exact cancellation of the two rays or a null in both patterns.
    gain_linear = std::numeric_limits<double>::min();
  }
  return {gain_linear, -10.0 * std::log10(gain_linear)};
}

void check_uav(const GeoLocation& uav) {
  validate(uav);
  if (!(uav.alt_m > 0.0)) throw Error(ErrorCode::InvalidLocation, "UAV altitude must be > 0");
}

}  // namespace

void validate(const PropagationConfig& cfg) {
  if (!(cfg.carrier_hz > 0.0) || !std::isfinite(cfg.carrier_hz)) {
    throw Error(ErrorCode::InvalidConfig, "carrier frequency must be > 0");
  }
  if (!(cfg.epsilon0 > 1.0) || !std::isfinite(cfg.epsilon0)) {
    throw Error(ErrorCode::InvalidConfig, "ground permittivity must be > 1");
  }
  if (!std::isfinite(cfg.tx_power_dbm)) throw Error(ErrorCode::InvalidConfig, "transmit power must be finite");
  if (!(cfg.bs_height_m >= 0.0)) throw Error(ErrorCode::InvalidConfig, "tower height must be >= 0");
}

double reflection_coefficient(double theta_r, double epsilon0) {
  if (!(theta_r > 0.0 && theta_r <= 0.5 * kPi + 1e-15)) {
    throw Error(ErrorCode::InvalidAngle, "reflection angle must be in (0, pi/2]");
  }
  if (!(epsilon0 > 1.0)) throw Error(ErrorCode::InvalidConfig, "ground permittivity must be > 1");
  const double s = std::sin(theta_r);
  const double c = std::cos(theta_r);
  const double root = std::sqrt(epsilon0 - c * c);
  return (epsilon0 * s - root) / (epsilon0 * s + root);
}

RayAngles ray_angles(const LinkGeometry& g, double h_bs, double h_uav) {
  RayAngles a;
  a.azimuth_deg = g.azimuth_deg;
  const double los = rad2deg(g.theta_l);
  a.los_elevation_deg = h_uav >= h_bs ? los : -los;
  a.ground_elevation_deg = -rad2deg(g.theta_r);
  return a;
}

LinkGeometry link_geometry(const PropagationConfig& cfg, const GeoLocation& bs, const GeoLocation& uav) {
  LinkGeometry g = link_geometry(bs, uav);
  // r1 + r2 - d_3d = 4 h_bs h_uav / (r1 + r2 + d_3d), free of cancellation.
  const double path_diff = 4.0 * bs.alt_m * uav.alt_m / (g.reflected_path_len + g.d_3d);
  g.delta_tau = 2.0 * kPi * path_diff / cfg.wavelength_m();
  return g;
}

PathLossResult pathloss_two_ray(const PropagationConfig& cfg, const GeoLocation& bs, const GeoLocation& uav) {
  validate(bs);
  check_uav(uav);
  const LinkGeometry g = link_geometry(cfg, bs, uav);
  const RayAngles ang = ray_angles(g, bs.alt_m, uav.alt_m);
  const double g_los = combined_gain(cfg.bs_pattern, cfg.uav_pattern, ang.azimuth_deg,
                                     apply_window(cfg.los_window, ang.los_elevation_deg));
  std::complex<double> field = std::sqrt(g_los) / g.d_3d;
  if (cfg.ground_reflection) {
    const double g_gnd = combined_gain(cfg.bs_pattern, cfg.uav_pattern, ang.azimuth_deg,
                                       apply_window(cfg.ground_window, ang.ground_elevation_deg));
    const double gamma = reflection_coefficient(g.theta_r, cfg.epsilon0);
    field += gamma * std::sqrt(g_gnd) * std::polar(1.0, -g.delta_tau) / g.reflected_path_len;
  }
  const double scale = cfg.wavelength_m() / (4.0 * kPi);
  return from_gain(scale * scale * std::norm(field));
}

PathLossResult pathloss_free_space(const PropagationConfig& cfg, const GeoLocation& bs,
                                   const GeoLocation& uav) {
  validate(bs);
  check_uav(uav);
  const LinkGeometry g = link_geometry(bs, uav);
  const RayAngles ang = ray_angles(g, bs.alt_m, uav.alt_m);
  const double g_los = combined_gain(cfg.bs_pattern, cfg.uav_pattern, ang.azimuth_deg,
                                     apply_window(cfg.los_window, ang.los_elevation_deg));
  const double scale = cfg.wavelength_m() / (4.0 * kPi);
  return from_gain(scale * scale * g_los / (g.d_3d * g.d_3d));
}

PathLossResult pathloss(const PropagationConfig& cfg, const GeoLocation& bs, const GeoLocation& uav,
                        PathLossModel model) {
  return model == PathLossModel::TwoRay ? pathloss_two_ray(cfg, bs, uav) : pathloss_free_space(cfg, bs, uav);
}

double predict_rsrp(const PropagationConfig& cfg, const GeoLocation& bs, const GeoLocation& uav,
                    PathLossModel model) {
  return cfg.tx_power_dbm - pathloss(cfg, bs, uav, model).loss_db;
}

ShadowingExtraction extract_shadowing(const PropagationConfig& cfg, const GeoLocation& bs,
                                      const MeasurementSet& samples, PathLossModel model) {
  validate(cfg);
  validate(bs);
  ShadowingExtraction out;
  const std::size_t n = samples.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.w_db.assign(n, nan);
  out.predicted_dbm.assign(n, nan);
  out.flagged.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const Sample& s = samples[i];
    try {
      const double predicted = predict_rsrp(cfg, bs, s.loc, model);
      out.predicted_dbm[i] = predicted;
      out.w_db[i] = s.rsrp_dbm - predicted;
    } catch (const Error&) {
      out.flagged[i] = 1;
      ++out.flagged_count;
    }
  }
  return out;
}

}  // namespace a2gmap
