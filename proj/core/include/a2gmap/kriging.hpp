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

#ifndef A2GMAP_KRIGING_HPP
#define A2GMAP_KRIGING_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "a2gmap/geo.hpp"
#include "a2gmap/measurement.hpp"
#include "a2gmap/propagation.hpp"
#include "a2gmap/statistics.hpp"

namespace a2gmap {

// Semi-variogram derived from the 3D correlation model:
//   gamma(l_i, l_j) = sigma_w^2 (1 - R(d_v, d_h)).
// A non-zero nugget adds a jump of `nugget` at every non-zero lag, which in
// covariance terms is a diagonal loading of the kriging system.
struct Variogram {
  CorrelationModel3D model;
  double nugget = 0.0;

  double sill() const noexcept { return model.sigma_w2 + nugget; }
};

double semivariogram(const Variogram& v, const GeoLocation& li, const GeoLocation& lj) noexcept;
// Same from precomputed separations.
double semivariogram(const Variogram& v, double d_v, double d_h) noexcept;

// Pool indices within `r0_m` (3D distance) of the target, nearest first, at
// most `m_max` of them. Ties break on index. Throws Error(NoNeighbors).
std::vector<std::size_t> select_neighbors(const GeoLocation& target, std::span<const GeoLocation> pool,
                                          double r0_m, std::size_t m_max);
std::vector<std::size_t> select_neighbors(const GeoLocation& target, const MeasurementSet& pool, double r0_m,
                                          std::size_t m_max);

struct KrigingSolution {
  std::vector<double> weights;  // mu_1 .. mu_M
  double lagrange = 0.0;        // kappa'
  double predicted = 0.0;       // sum mu_i r_i
  std::vector<std::size_t> neighbor_ids;
};

// Assembles the (M+1)x(M+1) ordinary-kriging system
//   [Gamma 1; 1^T 0] [mu; kappa'] = [gamma_0; 1]
// from pairwise semi-variograms, solves it with partial-pivot LU and returns
// the weighted prediction. Throws Error(NoNeighbors) for an empty set and
// Error(SingularSystem) when the system is numerically singular.
KrigingSolution solve_kriging(const Variogram& v, const GeoLocation& target,
                              std::span<const GeoLocation> neighbor_locations, std::span<const double> values,
                              std::span<const std::size_t> neighbor_ids = {});

// The (M+1)x(M+1) matrix and right-hand side, row-major, as solved above.
struct KrigingSystem {
  std::size_t order = 0;
  std::vector<double> matrix;
  std::vector<double> rhs;
};
KrigingSystem assemble_kriging_system(const Variogram& v, const GeoLocation& target,
                                      std::span<const GeoLocation> neighbor_locations);

// What is interpolated: the received power itself, or the shadowing residual
// r - (P_tx - PL) with the deterministic part added back afterwards.
enum class KrigingMode { Rsrp, Residual };

// Deterministic path-loss prediction used for residuals and as the
// prediction for targets with no neighbour inside r0.
struct PathLossTrend {
  PropagationConfig cfg;
  GeoLocation bs;
  PathLossModel model = PathLossModel::TwoRay;

  double operator()(const GeoLocation& loc) const { return predict_rsrp(cfg, bs, loc, model); }
};

struct KrigingOptions {
  Variogram variogram;
  double r0_m = 100.0;
  std::size_t m_max = 1000;
  KrigingMode mode = KrigingMode::Rsrp;
  std::optional<PathLossTrend> trend;
};

struct Prediction {
  double predicted_dbm = 0.0;
  std::size_t neighbor_count = 0;
  bool fallback = false;
};

// Full prediction at one target: neighbour selection, solve, fallback.
// Without a trend, a target with no neighbours throws Error(NoNeighbors).
Prediction predict(const KrigingOptions& opt, const MeasurementSet& pool, const GeoLocation& target);

// Predictions at every target sample. A target that is also a pool sample
// (same flight id and time stamp) is predicted with itself left out.
std::vector<Prediction> predict_targets(const KrigingOptions& opt, const MeasurementSet& pool,
                                        const MeasurementSet& targets);

struct RmseSummary {
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  std::size_t iterations = 0;
  std::size_t m = 0;
  std::size_t n0 = 0;
  double r0_m = 0.0;
  std::uint64_t fallback_predictions = 0;
  std::vector<double> rmse;  // one per iteration
};

// Root mean square error between predictions and measurements.
double rmse(std::span<const double> predicted, std::span<const double> measured);

// Repeated random validation: each iteration draws `m` pool samples and `n0`
// targets (targets never coincide with drawn pool samples when the two sets
// share samples), predicts every target from the drawn pool, and records the
// RMSE. Throws Error(InsufficientData) when either set is too small.
RmseSummary cross_validate(const KrigingOptions& opt, const MeasurementSet& pool, const MeasurementSet& targets,
                           std::size_t m, std::size_t n0, std::size_t iterations, std::uint64_t seed);

// RMSE of a perfect path-loss predictor: the shadowing standard deviation.
double baseline_rmse(const ShadowingStats& stats);

struct MapGrid {
  double lat_min_deg = 0.0, lat_max_deg = 0.0, lat_step_deg = 1.0;
  double lon_min_deg = 0.0, lon_max_deg = 0.0, lon_step_deg = 1.0;
  double alt_min_m = 0.0, alt_max_m = 0.0, alt_step_m = 1.0;
  // Explicit node list; overrides the extents when non-empty.
  std::vector<GeoLocation> nodes;
};

std::vector<GeoLocation> grid_nodes(const MapGrid& grid);

struct MapCell {
  GeoLocation loc;
  double predicted_dbm = 0.0;
  std::size_t neighbor_count = 0;
  bool fallback = false;
};

// Kriged prediction at every grid node. Throws Error(InsufficientData) on an
// empty pool.
std::vector<MapCell> generate_radio_map(const KrigingOptions& opt, const MeasurementSet& pool, const MapGrid& grid);

// Interpolated quantile (linear between order statistics).
double quantile(std::vector<double> values, double q);

}  // namespace a2gmap

#endif  // A2GMAP_KRIGING_HPP
