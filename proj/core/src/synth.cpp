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

#include "a2gmap/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include <Eigen/Dense>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

#include "a2gmap/error.hpp"

namespace a2gmap {

namespace {

double length(const EastNorth& a, const EastNorth& b) { return std::hypot(b.east_m - a.east_m, b.north_m - a.north_m); }

void check_spec(const TrajectorySpec& spec) {
  if (!(spec.sample_spacing_m > 0.0) || !std::isfinite(spec.sample_spacing_m)) {
    throw Error(ErrorCode::InvalidSpec, "sample spacing must be > 0");
  }
  if (spec.heights_m.empty()) throw Error(ErrorCode::InvalidSpec, "no flight heights given");
  for (double h : spec.heights_m) {
    if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorCode::InvalidSpec, "flight heights must be > 0");
  }
  GeoLocation origin = spec.origin;
  origin.alt_m = 0.0;
  if (!is_valid(origin)) throw Error(ErrorCode::InvalidSpec, "trajectory origin is not a valid location");
}

// Smallest t in [t_lo, 1] with |a + t (b - a) - p| = s, or a negative value.
double first_crossing(const EastNorth& a, const EastNorth& b, const EastNorth& p, double s, double t_lo) {
  const double dx = b.east_m - a.east_m;
  const double dy = b.north_m - a.north_m;
  const double fx = a.east_m - p.east_m;
  const double fy = a.north_m - p.north_m;
  const double qa = dx * dx + dy * dy;
  if (qa == 0.0) return -1.0;
  const double qb = 2.0 * (fx * dx + fy * dy);
  const double qc = fx * fx + fy * fy - s * s;
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc < 0.0) return -1.0;
  const double root = std::sqrt(disc);
  for (double t : {(-qb - root) / (2.0 * qa), (-qb + root) / (2.0 * qa)}) {
    if (t >= t_lo && t <= 1.0) return t;
  }
  return -1.0;
}

// Points along the polyline with consecutive chord length exactly `s`.
std::vector<EastNorth> resample(const std::vector<EastNorth>& path, double s) {
  std::vector<EastNorth> out{path.front()};
  std::size_t seg = 0;
  double t = 0.0;
  while (seg + 1 < path.size()) {
    const EastNorth& p = out.back();
    bool found = false;
    for (std::size_t k = seg; k + 1 < path.size(); ++k) {
      const double root = first_crossing(path[k], path[k + 1], p, s, k == seg ? t : 0.0);
      if (root >= 0.0) {
        const EastNorth& a = path[k];
        const EastNorth& b = path[k + 1];
        out.push_back({a.east_m + root * (b.east_m - a.east_m), a.north_m + root * (b.north_m - a.north_m)});
        seg = k;
        t = root;
        found = true;
        break;
      }
    }
    if (!found) break;
  }
  return out;
}

}  // namespace

std::size_t zigzag_leg_count(const ZigzagSpec& z) {
  if (!(z.width_m >= 0.0) || !(z.length_m > 0.0) || !(z.leg_spacing_m > 0.0)) {
    throw Error(ErrorCode::InvalidSpec, "zigzag needs width >= 0, length > 0 and leg spacing > 0");
  }
  return static_cast<std::size_t>(std::floor(z.width_m / z.leg_spacing_m + 1e-9)) + 1;
}

std::vector<EastNorth> trajectory_waypoints(const TrajectorySpec& spec) {
  if (!spec.waypoints.empty()) {
    if (spec.waypoints.size() < 2) throw Error(ErrorCode::InvalidSpec, "a waypoint path needs at least 2 points");
    for (const auto& w : spec.waypoints) {
      if (!std::isfinite(w.east_m) || !std::isfinite(w.north_m)) {
        throw Error(ErrorCode::InvalidSpec, "waypoint offsets must be finite");
      }
    }
    return spec.waypoints;
  }
  const std::size_t legs = zigzag_leg_count(spec.zigzag);
  std::vector<EastNorth> pts;
  pts.reserve(2 * legs);
  for (std::size_t k = 0; k < legs; ++k) {
    const double e = static_cast<double>(k) * spec.zigzag.leg_spacing_m;
    const bool northbound = k % 2 == 0;
    pts.push_back({e, northbound ? 0.0 : spec.zigzag.length_m});
    pts.push_back({e, northbound ? spec.zigzag.length_m : 0.0});
  }
  return pts;
}

std::vector<Track> generate_trajectory(const TrajectorySpec& spec) {
  check_spec(spec);
  const std::vector<EastNorth> path = trajectory_waypoints(spec);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) total += length(path[k], path[k + 1]);
  if (total < spec.sample_spacing_m) throw Error(ErrorCode::InvalidSpec, "path is shorter than one sample spacing");

  const std::vector<EastNorth> local = resample(path, spec.sample_spacing_m);

  // The local plane only supplies headings; positions are chained on the
  // sphere so each step is exactly one sample spacing long.
  GeoLocation start = spec.origin;
  start.alt_m = 0.0;
  start = destination(start, 90.0, path.front().east_m);
  start = destination(start, 0.0, path.front().north_m);
  std::vector<GeoLocation> flat{start};
  flat.reserve(local.size());
  for (std::size_t i = 1; i < local.size(); ++i) {
    const double bearing =
        rad2deg(std::atan2(local[i].east_m - local[i - 1].east_m, local[i].north_m - local[i - 1].north_m));
    flat.push_back(destination(flat.back(), bearing, spec.sample_spacing_m));
  }

  std::vector<Track> tracks;
  tracks.reserve(spec.heights_m.size());
  for (double h : spec.heights_m) {
    Track t;
    t.height_m = h;
    t.locations = flat;
    for (auto& loc : t.locations) loc.alt_m = h;
    tracks.push_back(std::move(t));
  }
  return tracks;
}

std::vector<double> standard_normals(std::size_t n, std::uint64_t seed) {
  boost::random::mt19937_64 rng(seed);
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> z(n);
  for (double& v : z) v = normal(rng);
  return z;
}

struct ShadowingFieldSampler::Impl {
  std::vector<std::size_t> node_of;  // location index -> distinct node
  Eigen::MatrixXd factor;            // lower-triangular
  double jitter = 0.0;
};

ShadowingFieldSampler::ShadowingFieldSampler(std::span<const GeoLocation> locations, const CorrelationModel3D& model)
    : impl_(std::make_unique<Impl>()) {
  validate(model);
  // Exactly coincident locations share one node so they receive the same value.
  std::map<std::tuple<double, double, double>, std::size_t> index;
  std::vector<GeoLocation> nodes;
  impl_->node_of.reserve(locations.size());
  for (const auto& loc : locations) {
    validate(loc);
    const auto [it, inserted] = index.try_emplace({loc.lat_deg, loc.lon_deg, loc.alt_m}, nodes.size());
    if (inserted) nodes.push_back(loc);
    impl_->node_of.push_back(it->second);
  }

  const auto n = static_cast<Eigen::Index>(nodes.size());
  std::vector<UnitVector> unit(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) unit[i] = to_unit_vector(nodes[i]);
  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    cov(i, i) = model.sigma_w2;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double d_h = horizontal_distance(unit[i], unit[j]);
      const double d_v = vertical_distance(nodes[i], nodes[j]);
      cov(i, j) = cov(j, i) = model.sigma_w2 * eval_correlation_3d(model, d_v, d_h);
    }
  }

  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  double jitter = 1e-10 * model.sigma_w2;
  while (llt.info() != Eigen::Success) {
    if (jitter > 1e-6 * model.sigma_w2 * (1.0 + 1e-12)) {
      throw Error(ErrorCode::FactorizationFailed,
                  "shadowing covariance is not positive definite even with diagonal jitter");
    }
    Eigen::MatrixXd loaded = cov;
    loaded.diagonal().array() += jitter;
    llt.compute(loaded);
    if (llt.info() == Eigen::Success) impl_->jitter = jitter;
    jitter *= 2.0;
  }
  impl_->factor = llt.matrixL();
}

ShadowingFieldSampler::~ShadowingFieldSampler() = default;
ShadowingFieldSampler::ShadowingFieldSampler(ShadowingFieldSampler&&) noexcept = default;
ShadowingFieldSampler& ShadowingFieldSampler::operator=(ShadowingFieldSampler&&) noexcept = default;

std::vector<double> ShadowingFieldSampler::draw(std::uint64_t seed) const {
  const auto n = impl_->factor.rows();
  const std::vector<double> z = standard_normals(static_cast<std::size_t>(n), seed);
  const Eigen::VectorXd field =
      impl_->factor.triangularView<Eigen::Lower>() * Eigen::Map<const Eigen::VectorXd>(z.data(), n);
  std::vector<double> w;
  w.reserve(impl_->node_of.size());
  for (std::size_t node : impl_->node_of) w.push_back(field[static_cast<Eigen::Index>(node)]);
  return w;
}

std::size_t ShadowingFieldSampler::size() const noexcept { return impl_->node_of.size(); }

double ShadowingFieldSampler::jitter() const noexcept { return impl_->jitter; }

std::vector<double> sample_shadowing_field(std::span<const GeoLocation> locations, const CorrelationModel3D& model,
                                           std::uint64_t seed) {
  return ShadowingFieldSampler(locations, model).draw(seed);
}

MeasurementSet synthesize_rsrp(const SyntheticScenario& scenario) {
  const std::vector<Track> tracks = generate_trajectory(scenario.trajectory);
  std::vector<GeoLocation> all;
  for (const auto& t : tracks) all.insert(all.end(), t.locations.begin(), t.locations.end());
  const ShadowingFieldSampler sampler(all, scenario.field);
  return synthesize_rsrp(scenario, tracks, sampler);
}

MeasurementSet synthesize_rsrp(const SyntheticScenario& scenario, const std::vector<Track>& tracks,
                               const ShadowingFieldSampler& sampler) {
  validate(scenario.cfg);
  validate(scenario.bs);
  if (!(scenario.sample_period_s > 0.0)) throw Error(ErrorCode::InvalidSpec, "sample period must be > 0");
  std::size_t total = 0;
  for (const auto& t : tracks) total += t.locations.size();
  if (total != sampler.size()) {
    throw Error(ErrorCode::InvalidSpec, "field sampler was built for " + std::to_string(sampler.size()) +
                                            " locations, trajectory has " + std::to_string(total));
  }
  const std::vector<double> w = sampler.draw(scenario.seed);

  MeasurementSet set;
  set.calibrated = true;
  set.samples.reserve(total);
  std::size_t k = 0;
  for (std::size_t f = 0; f < tracks.size(); ++f) {
    const Track& track = tracks[f];
    const auto mean = scenario.height_mean_db.find(track.height_m);
    const double offset = mean == scenario.height_mean_db.end() ? 0.0 : mean->second;
    for (std::size_t i = 0; i < track.locations.size(); ++i, ++k) {
      Sample s;
      s.t_s = static_cast<double>(i) * scenario.sample_period_s;
      s.loc = track.locations[i];
      s.flight_id = static_cast<int>(f) + 1;
      s.height_label_m = track.height_m;
      const double pl = pathloss(scenario.cfg, scenario.bs, s.loc, scenario.model).loss_db;
      const double shadow = w[k] + offset;
      s.rsrp_dbm = scenario.cfg.tx_power_dbm - pl + shadow;
      s.true_pl_db = pl;
      s.true_w_db = shadow;
      set.samples.push_back(std::move(s));
    }
  }
  return set;
}

}  // namespace a2gmap
