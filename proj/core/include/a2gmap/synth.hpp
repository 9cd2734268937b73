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

#ifndef A2GMAP_SYNTH_HPP
#define A2GMAP_SYNTH_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "a2gmap/geo.hpp"
#include "a2gmap/measurement.hpp"
#include "a2gmap/propagation.hpp"
#include "a2gmap/statistics.hpp"

namespace a2gmap {

// Local east/north offset from the trajectory origin, in meters.
struct EastNorth {
  double east_m = 0.0;
  double north_m = 0.0;
};

// Lawnmower pattern: legs run south -> north and north -> south across a
// box, spaced `leg_spacing_m` apart in the east direction.
struct ZigzagSpec {
  double width_m = 400.0;   // east extent
  double length_m = 400.0;  // north extent
  double leg_spacing_m = 50.0;
};

struct TrajectorySpec {
  GeoLocation origin;                 // south-west corner; altitude ignored
  std::vector<EastNorth> waypoints;   // used when non-empty, else `zigzag`
  ZigzagSpec zigzag;
  double sample_spacing_m = 2.0;
  std::vector<double> heights_m = {30.0, 50.0, 70.0, 90.0, 110.0};
};

// Number of legs a zigzag produces: floor(width / spacing) + 1.
std::size_t zigzag_leg_count(const ZigzagSpec& z);

// Polyline corners in local coordinates for the spec.
std::vector<EastNorth> trajectory_waypoints(const TrajectorySpec& spec);

struct Track {
  double height_m = 0.0;
  std::vector<GeoLocation> locations;
};

// Samples spaced exactly `sample_spacing_m` apart (straight-line distance
// between consecutive samples) along the waypoint polyline; the same 2D
// track is repeated at every height. Throws Error(InvalidSpec).
std::vector<Track> generate_trajectory(const TrajectorySpec& spec);

// Dense covariance sigma_w^2 R(d_v, d_h) over `locations`, factored once
// (Cholesky with escalating diagonal jitter) and reusable for many draws.
class ShadowingFieldSampler {
 public:
  ShadowingFieldSampler(std::span<const GeoLocation> locations, const CorrelationModel3D& model);
  ~ShadowingFieldSampler();
  ShadowingFieldSampler(ShadowingFieldSampler&&) noexcept;
  ShadowingFieldSampler& operator=(ShadowingFieldSampler&&) noexcept;

  // One zero-mean draw; identical for identical seeds.
  std::vector<double> draw(std::uint64_t seed) const;

  std::size_t size() const noexcept;
  // Jitter that was added to the diagonal (0 when none was needed).
  double jitter() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::vector<double> sample_shadowing_field(std::span<const GeoLocation> locations, const CorrelationModel3D& model,
                                           std::uint64_t seed);

// Standard normal variates from a fixed generator (mt19937_64 + Boost's
// normal distribution) so streams match across platforms.
std::vector<double> standard_normals(std::size_t n, std::uint64_t seed);

struct SyntheticScenario {
  PropagationConfig cfg;
  GeoLocation bs;  // altitude = tower height
  PathLossModel model = PathLossModel::TwoRay;
  CorrelationModel3D field;
  TrajectorySpec trajectory;
  std::uint64_t seed = 1;
  // Optional per-height mean added to the field (height -> dB).
  std::map<double, double> height_mean_db;
  double sample_period_s = 1.0;
};

// r = P_tx - PL + w with truth columns filled. Flight ids follow the order
// of trajectory.heights_m starting at 1. The result is marked calibrated.
MeasurementSet synthesize_rsrp(const SyntheticScenario& scenario);

// Same, reusing an already factored field over the scenario's trajectory.
MeasurementSet synthesize_rsrp(const SyntheticScenario& scenario, const std::vector<Track>& tracks,
                               const ShadowingFieldSampler& sampler);

}  // namespace a2gmap

#endif  // A2GMAP_SYNTH_HPP
