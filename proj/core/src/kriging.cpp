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

#include "a2gmap/kriging.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <tuple>
#include <utility>

#include <Eigen/Dense>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include "a2gmap/error.hpp"
#include "a2gmap/parallel.hpp"

namespace a2gmap {

namespace {

// Reciprocal condition estimate below which the system counts as singular.
constexpr double kMinRcond = 1e-13;

struct PreparedPool {
  std::vector<UnitVector> points;
  std::vector<double> alt;

  explicit PreparedPool(std::span<const GeoLocation> locs) {
    points.reserve(locs.size());
    alt.reserve(locs.size());
    for (const auto& l : locs) {
      points.push_back(to_unit_vector(l));
      alt.push_back(l.alt_m);
    }
  }

  std::size_t size() const noexcept { return alt.size(); }
};

std::vector<std::size_t> neighbors_in(const PreparedPool& pool, const GeoLocation& target, double r0_m,
                                      std::size_t m_max, std::span<const std::size_t> subset = {}) {
  if (!(r0_m > 0.0)) throw Error(ErrorCode::InvalidConfig, "neighbour radius must be > 0");
  if (m_max < 1) throw Error(ErrorCode::InvalidConfig, "neighbour cap must be >= 1");
  const UnitVector t = to_unit_vector(target);
  // (distance, pool index, position in the searched range)
  std::vector<std::tuple<double, std::size_t, std::size_t>> hits;
  const std::size_t n = subset.empty() ? pool.size() : subset.size();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = subset.empty() ? k : subset[k];
    const double dh = horizontal_distance(t, pool.points[i]);
    const double d = std::hypot(dh, target.alt_m - pool.alt[i]);
    if (d <= r0_m) hits.emplace_back(d, i, k);
  }
  if (hits.empty()) throw Error(ErrorCode::NoNeighbors, "no samples within r0 of the target");
  const std::size_t keep = std::min(m_max, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(keep), hits.end());
  std::vector<std::size_t> out(keep);
  for (std::size_t k = 0; k < keep; ++k) out[k] = std::get<2>(hits[k]);
  return out;
}

// Solves the bordered system given the neighbour-neighbour semi-variograms
// (callback) and the target column.
template <typename GammaFn>
KrigingSolution solve_system(std::size_t m, GammaFn&& gamma_ij, std::span<const double> gamma0,
                             std::span<const double> values) {
  if (m == 0) throw Error(ErrorCode::NoNeighbors, "kriging needs at least one neighbour");
  const auto n = static_cast<Eigen::Index>(m + 1);
  Eigen::MatrixXd a(n, n);
  Eigen::VectorXd b(n);
  for (std::size_t i = 0; i < m; ++i) {
    a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = gamma_ij(i, i);
    for (std::size_t j = i + 1; j < m; ++j) {
      const double g = gamma_ij(i, j);
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = g;
      a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = g;
    }
    a(static_cast<Eigen::Index>(i), n - 1) = 1.0;
    a(n - 1, static_cast<Eigen::Index>(i)) = 1.0;
    b(static_cast<Eigen::Index>(i)) = gamma0[i];
  }
  a(n - 1, n - 1) = 0.0;
  b(n - 1) = 1.0;

  KrigingSolution sol;
  if (m == 1) {
    sol.weights = {1.0};
    sol.lagrange = gamma0[0] - a(0, 0);
    sol.predicted = values[0];
    return sol;
  }
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const double rcond = lu.rcond();
  if (!(rcond > kMinRcond)) {
    throw Error(ErrorCode::SingularSystem,
                "kriging system is singular (rcond " + std::to_string(rcond) + "); duplicate neighbour locations?");
  }
  const Eigen::VectorXd x = lu.solve(b);
  if (!x.allFinite()) throw Error(ErrorCode::SingularSystem, "kriging solution is not finite");
  sol.weights.assign(x.data(), x.data() + m);
  sol.lagrange = x(n - 1);
  double pred = 0.0;
  for (std::size_t i = 0; i < m; ++i) pred += sol.weights[i] * values[i];
  sol.predicted = pred;
  return sol;
}

// Between two distinct samples the nugget always applies, even when they
// share a location; this is what keeps duplicates solvable.
double between_samples(const Variogram& v, double d_v, double d_h) noexcept {
  return v.model.sigma_w2 * (1.0 - eval_correlation_3d(v.model, d_v, d_h)) + v.nugget;
}

struct LocalSemivariogram {
  const Variogram& v;
  std::span<const UnitVector> points;
  std::span<const double> alt;

  double operator()(std::size_t i, std::size_t j) const {
    if (i == j) return 0.0;
    return between_samples(v, std::abs(alt[i] - alt[j]), horizontal_distance(points[i], points[j]));
  }
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// First `k` entries of a uniformly shuffled 0..n-1 (partial Fisher-Yates).
std::vector<std::size_t> draw_without_replacement(std::size_t n, std::size_t k, boost::random::mt19937_64& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    boost::random::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(k);
  return idx;
}

double residual_value(const KrigingOptions& opt, const Sample& s) {
  return opt.mode == KrigingMode::Rsrp ? s.rsrp_dbm : s.rsrp_dbm - (*opt.trend)(s.loc);
}

void check_options(const KrigingOptions& opt) {
  validate(opt.variogram.model);
  if (!(opt.variogram.nugget >= 0.0)) throw Error(ErrorCode::InvalidConfig, "nugget must be >= 0");
  if (opt.mode == KrigingMode::Residual && !opt.trend) {
    throw Error(ErrorCode::InvalidConfig, "residual kriging needs a path-loss trend");
  }
}

constexpr std::size_t kNoExclusion = static_cast<std::size_t>(-1);

// Prediction at `target` from the prepared pool, optionally leaving out one
// pool sample (the target itself in leave-one-out runs).
Prediction predict_prepared(const KrigingOptions& opt, const PreparedPool& pool, std::span<const double> values,
                            const GeoLocation& target, std::size_t exclude = kNoExclusion) {
  std::vector<std::size_t> ids;
  try {
    const std::size_t cap = exclude == kNoExclusion ? opt.m_max : opt.m_max + 1;
    ids = neighbors_in(pool, target, opt.r0_m, cap);
    if (exclude != kNoExclusion) {
      const auto self = std::find(ids.begin(), ids.end(), exclude);
      if (self != ids.end()) {
        ids.erase(self);
      } else if (ids.size() > opt.m_max) {
        ids.pop_back();
      }
      if (ids.empty()) throw Error(ErrorCode::NoNeighbors, "no samples within r0 of the target");
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoNeighbors || !opt.trend) throw;
    return {(*opt.trend)(target), 0, true};
  }
  std::vector<UnitVector> pts;
  std::vector<double> alt;
  std::vector<double> vals;
  for (std::size_t i : ids) {
    pts.push_back(pool.points[i]);
    alt.push_back(pool.alt[i]);
    vals.push_back(values[i]);
  }
  const UnitVector t = to_unit_vector(target);
  std::vector<double> gamma0(ids.size());
  for (std::size_t q = 0; q < ids.size(); ++q) {
    gamma0[q] = semivariogram(opt.variogram, std::abs(target.alt_m - alt[q]), horizontal_distance(t, pts[q]));
  }
  double value = solve_system(ids.size(), LocalSemivariogram{opt.variogram, pts, alt}, gamma0, vals).predicted;
  if (opt.mode == KrigingMode::Residual) value += (*opt.trend)(target);
  return {value, ids.size(), false};
}

std::vector<double> pool_values(const KrigingOptions& opt, const MeasurementSet& pool) {
  std::vector<double> values(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) values[i] = residual_value(opt, pool[i]);
  return values;
}

}  // namespace

double semivariogram(const Variogram& v, double d_v, double d_h) noexcept {
  if (d_v == 0.0 && d_h == 0.0) return 0.0;
  return v.model.sigma_w2 * (1.0 - eval_correlation_3d(v.model, d_v, d_h)) + v.nugget;
}

double semivariogram(const Variogram& v, const GeoLocation& li, const GeoLocation& lj) noexcept {
  return semivariogram(v, vertical_distance(li, lj), horizontal_distance(li, lj));
}

std::vector<std::size_t> select_neighbors(const GeoLocation& target, std::span<const GeoLocation> pool,
                                          double r0_m, std::size_t m_max) {
  return neighbors_in(PreparedPool(pool), target, r0_m, m_max);
}

std::vector<std::size_t> select_neighbors(const GeoLocation& target, const MeasurementSet& pool, double r0_m,
                                          std::size_t m_max) {
  const auto locs = pool.locations();
  return select_neighbors(target, std::span<const GeoLocation>(locs), r0_m, m_max);
}

KrigingSystem assemble_kriging_system(const Variogram& v, const GeoLocation& target,
                                      std::span<const GeoLocation> neighbors) {
  const std::size_t m = neighbors.size();
  KrigingSystem sys;
  sys.order = m + 1;
  sys.matrix.assign(sys.order * sys.order, 0.0);
  sys.rhs.assign(sys.order, 1.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      sys.matrix[i * sys.order + j] =
          i == j ? 0.0
                 : between_samples(v, vertical_distance(neighbors[i], neighbors[j]),
                                   horizontal_distance(neighbors[i], neighbors[j]));
    }
    sys.matrix[i * sys.order + m] = 1.0;
    sys.matrix[m * sys.order + i] = 1.0;
    sys.rhs[i] = semivariogram(v, target, neighbors[i]);
  }
  return sys;
}

KrigingSolution solve_kriging(const Variogram& v, const GeoLocation& target,
                              std::span<const GeoLocation> neighbor_locations, std::span<const double> values,
                              std::span<const std::size_t> neighbor_ids) {
  if (neighbor_locations.size() != values.size()) {
    throw Error(ErrorCode::InvalidConfig, "neighbour locations and values differ in length");
  }
  const std::size_t m = neighbor_locations.size();
  if (m == 0) throw Error(ErrorCode::NoNeighbors, "kriging needs at least one neighbour");
  const PreparedPool prepared(neighbor_locations);
  const UnitVector t = to_unit_vector(target);
  std::vector<double> gamma0(m);
  for (std::size_t i = 0; i < m; ++i) {
    gamma0[i] = semivariogram(v, std::abs(target.alt_m - prepared.alt[i]), horizontal_distance(t, prepared.points[i]));
  }
  KrigingSolution sol = solve_system(m, LocalSemivariogram{v, prepared.points, prepared.alt}, gamma0, values);
  if (neighbor_ids.empty()) {
    sol.neighbor_ids.resize(m);
    std::iota(sol.neighbor_ids.begin(), sol.neighbor_ids.end(), std::size_t{0});
  } else {
    sol.neighbor_ids.assign(neighbor_ids.begin(), neighbor_ids.end());
  }
  return sol;
}

Prediction predict(const KrigingOptions& opt, const MeasurementSet& pool, const GeoLocation& target) {
  check_options(opt);
  const auto locs = pool.locations();
  return predict_prepared(opt, PreparedPool(locs), pool_values(opt, pool), target);
}

std::vector<Prediction> predict_targets(const KrigingOptions& opt, const MeasurementSet& pool,
                                        const MeasurementSet& targets) {
  check_options(opt);
  const auto locs = pool.locations();
  const PreparedPool prepared(locs);
  const std::vector<double> values = pool_values(opt, pool);
  std::map<std::pair<int, double>, std::size_t> pool_keys;
  for (std::size_t i = 0; i < pool.size(); ++i) pool_keys.emplace(std::make_pair(pool[i].flight_id, pool[i].t_s), i);

  std::vector<Prediction> out(targets.size());
  const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(256, targets.size()));
  parallel_chunks(chunks, [&](std::size_t c) {
    const auto [begin, end] = chunk_range(targets.size(), chunks, c);
    for (std::size_t t = begin; t < end; ++t) {
      const auto it = pool_keys.find({targets[t].flight_id, targets[t].t_s});
      out[t] = predict_prepared(opt, prepared, values, targets[t].loc,
                                it == pool_keys.end() ? kNoExclusion : it->second);
    }
  });
  return out;
}

double rmse(std::span<const double> predicted, std::span<const double> measured) {
  if (predicted.size() != measured.size() || predicted.empty()) {
    throw Error(ErrorCode::InsufficientData, "RMSE needs equally sized, non-empty inputs");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double e = predicted[i] - measured[i];
    s += e * e;
  }
  return std::sqrt(s / static_cast<double>(predicted.size()));
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw Error(ErrorCode::InsufficientData, "quantile of an empty set");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

RmseSummary cross_validate(const KrigingOptions& opt, const MeasurementSet& pool, const MeasurementSet& targets,
                           std::size_t m, std::size_t n0, std::size_t iterations, std::uint64_t seed) {
  check_options(opt);
  if (iterations < 1) throw Error(ErrorCode::InvalidConfig, "cross-validation needs >= 1 iteration");
  if (m < 1 || n0 < 1) throw Error(ErrorCode::InvalidConfig, "M and N0 must be >= 1");
  if (pool.size() < m) {
    throw Error(ErrorCode::InsufficientData,
                "pool holds " + std::to_string(pool.size()) + " samples, M = " + std::to_string(m));
  }

  const auto pool_locs = pool.locations();
  const PreparedPool prepared(pool_locs);
  const std::vector<double> sample_values = pool_values(opt, pool);

  // Target samples that are also pool samples must be excluded whenever the
  // pool draw picks them.
  std::vector<std::ptrdiff_t> target_in_pool(targets.size(), -1);
  {
    std::map<std::pair<int, double>, std::size_t> pool_keys;
    for (std::size_t i = 0; i < pool.size(); ++i) pool_keys.emplace(std::make_pair(pool[i].flight_id, pool[i].t_s), i);
    for (std::size_t t = 0; t < targets.size(); ++t) {
      const auto it = pool_keys.find({targets[t].flight_id, targets[t].t_s});
      if (it != pool_keys.end()) target_in_pool[t] = static_cast<std::ptrdiff_t>(it->second);
    }
  }
  std::vector<double> trend_at_target(targets.size(), 0.0);
  if (opt.trend) {
    for (std::size_t t = 0; t < targets.size(); ++t) trend_at_target[t] = (*opt.trend)(targets[t].loc);
  }

  RmseSummary summary;
  summary.iterations = iterations;
  summary.m = m;
  summary.n0 = n0;
  summary.r0_m = opt.r0_m;
  summary.rmse.assign(iterations, 0.0);
  std::vector<std::uint64_t> fallbacks(iterations, 0);

  parallel_chunks(iterations, [&](std::size_t it) {
    boost::random::mt19937_64 rng(splitmix64(seed ^ splitmix64(it)));
    const std::vector<std::size_t> chosen = draw_without_replacement(pool.size(), m, rng);
    std::vector<char> picked(pool.size(), 0);
    for (std::size_t i : chosen) picked[i] = 1;
    std::vector<std::size_t> candidates;
    candidates.reserve(targets.size());
    for (std::size_t t = 0; t < targets.size(); ++t) {
      if (target_in_pool[t] < 0 || !picked[static_cast<std::size_t>(target_in_pool[t])]) candidates.push_back(t);
    }
    if (candidates.size() < n0) {
      throw Error(ErrorCode::InsufficientData,
                  "only " + std::to_string(candidates.size()) + " validation samples left, N0 = " + std::to_string(n0));
    }
    const std::vector<std::size_t> pick = draw_without_replacement(candidates.size(), n0, rng);

    // Semi-variogram between every pair of drawn pool samples, reused by all
    // targets of this iteration.
    std::vector<double> gamma(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        const std::size_t a = chosen[i];
        const std::size_t b = chosen[j];
        const double g = semivariogram(opt.variogram, std::abs(prepared.alt[a] - prepared.alt[b]),
                                       horizontal_distance(prepared.points[a], prepared.points[b]));
        gamma[i * m + j] = gamma[j * m + i] = g;
      }
    }

    std::vector<double> predicted(n0);
    std::vector<double> measured(n0);
    for (std::size_t k = 0; k < n0; ++k) {
      const Sample& target = targets[candidates[pick[k]]];
      measured[k] = target.rsrp_dbm;
      std::vector<std::size_t> local;
      try {
        local = neighbors_in(prepared, target.loc, opt.r0_m, opt.m_max, chosen);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoNeighbors || !opt.trend) throw;
        predicted[k] = trend_at_target[candidates[pick[k]]];
        ++fallbacks[it];
        continue;
      }
      const UnitVector t = to_unit_vector(target.loc);
      std::vector<double> gamma0(local.size());
      std::vector<double> values(local.size());
      for (std::size_t q = 0; q < local.size(); ++q) {
        const std::size_t p = chosen[local[q]];
        gamma0[q] = semivariogram(opt.variogram, std::abs(target.loc.alt_m - prepared.alt[p]),
                                  horizontal_distance(t, prepared.points[p]));
        values[q] = sample_values[p];
      }
      const auto g = [&](std::size_t i, std::size_t j) { return gamma[local[i] * m + local[j]]; };
      double value = solve_system(local.size(), g, gamma0, values).predicted;
      if (opt.mode == KrigingMode::Residual) value += trend_at_target[candidates[pick[k]]];
      predicted[k] = value;
    }
    summary.rmse[it] = rmse(predicted, measured);
  });

  for (auto f : fallbacks) summary.fallback_predictions += f;
  summary.median = quantile(summary.rmse, 0.5);
  summary.q25 = quantile(summary.rmse, 0.25);
  summary.q75 = quantile(summary.rmse, 0.75);
  return summary;
}

double baseline_rmse(const ShadowingStats& stats) {
  if (!(stats.std_db > 0.0)) throw Error(ErrorCode::DegenerateStd, "baseline needs a positive shadowing std");
  return stats.std_db;
}

std::vector<GeoLocation> grid_nodes(const MapGrid& grid) {
  if (!grid.nodes.empty()) return grid.nodes;
  if (!(grid.lat_step_deg > 0.0) || !(grid.lon_step_deg > 0.0) || !(grid.alt_step_m > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "grid steps must be > 0");
  }
  const auto count = [](double lo, double hi, double step) {
    if (hi < lo) throw Error(ErrorCode::InvalidConfig, "grid extent max < min");
    return static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  };
  const std::size_t n_lat = count(grid.lat_min_deg, grid.lat_max_deg, grid.lat_step_deg);
  const std::size_t n_lon = count(grid.lon_min_deg, grid.lon_max_deg, grid.lon_step_deg);
  const std::size_t n_alt = count(grid.alt_min_m, grid.alt_max_m, grid.alt_step_m);
  std::vector<GeoLocation> nodes;
  nodes.reserve(n_lat * n_lon * n_alt);
  for (std::size_t k = 0; k < n_alt; ++k) {
    for (std::size_t i = 0; i < n_lat; ++i) {
      for (std::size_t j = 0; j < n_lon; ++j) {
        nodes.push_back({grid.lat_min_deg + static_cast<double>(i) * grid.lat_step_deg,
                         grid.lon_min_deg + static_cast<double>(j) * grid.lon_step_deg,
                         grid.alt_min_m + static_cast<double>(k) * grid.alt_step_m});
      }
    }
  }
  return nodes;
}

std::vector<MapCell> generate_radio_map(const KrigingOptions& opt, const MeasurementSet& pool, const MapGrid& grid) {
  if (pool.empty()) throw Error(ErrorCode::InsufficientData, "radio map needs a non-empty pool");
  check_options(opt);
  const std::vector<GeoLocation> nodes = grid_nodes(grid);
  const auto locs = pool.locations();
  const PreparedPool prepared(locs);
  const std::vector<double> values = pool_values(opt, pool);

  std::vector<MapCell> cells(nodes.size());
  const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(256, nodes.size()));
  parallel_chunks(chunks, [&](std::size_t c) {
    const auto [begin, end] = chunk_range(nodes.size(), chunks, c);
    for (std::size_t n = begin; n < end; ++n) {
      const Prediction p = predict_prepared(opt, prepared, values, nodes[n]);
      cells[n] = {nodes[n], p.predicted_dbm, p.neighbor_count, p.fallback};
    }
  });
  return cells;
}

}  // namespace a2gmap
