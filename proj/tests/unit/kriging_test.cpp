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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "a2gmap/error.hpp"
#include "a2gmap/kriging.hpp"
#include "test_support.hpp"

namespace a2gmap {
namespace {

const Variogram kVariogram{};  // default model parameters, no nugget

GeoLocation around(double bearing, double dist, double alt) {
  GeoLocation p = destination(testing::site(), bearing, dist);
  p.alt_m = alt;
  return p;
}

// gamma written out from the correlation model, independent of the library's
// assembly code.
double oracle_gamma(const CorrelationModel3D& m, const GeoLocation& a, const GeoLocation& b) {
  const double dh = horizontal_distance(a, b);
  const double dv = std::abs(a.alt_m - b.alt_m);
  const double r = std::exp(-dv / m.d_cor_m * std::log(2.0)) *
                   (m.a * std::exp(-m.b1 * dh) + (1.0 - m.a) * std::exp(-m.b2 * dh));
  return m.sigma_w2 * (1.0 - r);
}

TEST(Semivariogram, ZeroAtZeroLagAndSillFarAway) {
  const GeoLocation l = around(10.0, 20.0, 50.0);
  EXPECT_EQ(semivariogram(kVariogram, l, l), 0.0);
  EXPECT_NEAR(semivariogram(kVariogram, 200.0, 2000.0), kVariogram.model.sigma_w2, 0.01 * kVariogram.model.sigma_w2);
  Variogram nug = kVariogram;
  nug.nugget = 0.5;
  EXPECT_EQ(semivariogram(nug, 0.0, 0.0), 0.0);
  EXPECT_NEAR(semivariogram(nug, 0.0, 1e-9), 0.5, 1e-6);
  EXPECT_DOUBLE_EQ(nug.sill(), kVariogram.model.sigma_w2 + 0.5);
}

TEST(SolveKriging, MatchesDenseOracle) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> count(1, 10), level(0, 4);
  std::uniform_real_distribution<double> brg(0.0, 360.0), dist(0.0, 80.0), val(-110.0, -60.0);
  for (int inst = 0; inst < 1000; ++inst) {
    const int m = count(rng);
    std::vector<GeoLocation> locs;
    std::vector<double> values;
    for (int i = 0; i < m; ++i) {
      locs.push_back(around(brg(rng), dist(rng), 30.0 + 20.0 * level(rng)));
      values.push_back(val(rng));
    }
    const GeoLocation target = around(brg(rng), dist(rng), 30.0 + 20.0 * level(rng));

    const std::size_t n = static_cast<std::size_t>(m) + 1;
    std::vector<double> a(n * n, 0.0), b(n, 1.0);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) a[i * n + j] = i == j ? 0.0 : oracle_gamma(kVariogram.model, locs[i], locs[j]);
      a[i * n + m] = a[m * n + i] = 1.0;
      b[i] = oracle_gamma(kVariogram.model, target, locs[i]);
    }
    const std::vector<double> x = testing::dense_solve(a, b);
    ASSERT_EQ(x.size(), n);

    const KrigingSolution sol = solve_kriging(kVariogram, target, locs, values);
    ASSERT_EQ(sol.weights.size(), static_cast<std::size_t>(m));
    double sum = 0.0, pred = 0.0;
    for (int i = 0; i < m; ++i) {
      EXPECT_NEAR(sol.weights[i], x[i], 1e-8) << "instance " << inst;
      sum += sol.weights[i];
      pred += x[i] * values[i];
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
    EXPECT_NEAR(sol.predicted, pred, 1e-6);
    if (m > 1) EXPECT_NEAR(sol.lagrange, x[m], 1e-6);
  }
}

TEST(SolveKriging, AssembledSystemMatchesOracle) {
  const std::vector<GeoLocation> locs = {around(0, 5, 30), around(90, 12, 50), around(200, 30, 30)};
  const GeoLocation target = around(45, 8, 40);
  const KrigingSystem sys = assemble_kriging_system(kVariogram, target, locs);
  ASSERT_EQ(sys.order, 4u);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_NEAR(sys.matrix[i * 4 + j], i == j ? 0.0 : oracle_gamma(kVariogram.model, locs[i], locs[j]), 1e-9);
    }
    EXPECT_EQ(sys.matrix[i * 4 + 3], 1.0);
    EXPECT_EQ(sys.matrix[3 * 4 + i], 1.0);
    EXPECT_NEAR(sys.rhs[i], oracle_gamma(kVariogram.model, target, locs[i]), 1e-9);
  }
  EXPECT_EQ(sys.matrix[15], 0.0);
  EXPECT_EQ(sys.rhs[3], 1.0);
}

TEST(SolveKriging, SingleNeighbourTakesAllWeight) {
  const std::vector<GeoLocation> locs = {around(0, 40, 70)};
  const std::vector<double> v = {-87.5};
  const KrigingSolution sol = solve_kriging(kVariogram, around(180, 10, 30), locs, v);
  ASSERT_EQ(sol.weights.size(), 1u);
  EXPECT_EQ(sol.weights[0], 1.0);
  EXPECT_EQ(sol.predicted, -87.5);
}

TEST(SolveKriging, ExactAtPoolLocations) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> brg(0.0, 360.0), dist(0.0, 60.0), val(-100.0, -70.0);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<GeoLocation> locs;
    std::vector<double> values;
    for (int i = 0; i < 8; ++i) {
      locs.push_back(around(brg(rng), dist(rng), 30.0 + 20.0 * (i % 3)));
      values.push_back(val(rng));
    }
    const std::size_t k = static_cast<std::size_t>(rep % 8);
    EXPECT_NEAR(solve_kriging(kVariogram, locs[k], locs, values).predicted, values[k], 1e-8);
  }
}

TEST(SolveKriging, SymmetricNeighboursShareWeight) {
  const std::vector<GeoLocation> locs = {around(0, 15, 50), around(120, 15, 50), around(240, 15, 50)};
  const std::vector<double> v = {-80.0, -90.0, -100.0};
  const KrigingSolution sol = solve_kriging(kVariogram, testing::site(50.0), locs, v);
  for (double w : sol.weights) EXPECT_NEAR(w, 1.0 / 3.0, 1e-6);
  EXPECT_NEAR(sol.predicted, -90.0, 1e-4);
}

TEST(SolveKriging, InvariantToACommonAltitudeShift) {
  std::vector<GeoLocation> locs = {around(10, 5, 30), around(100, 22, 50), around(250, 9, 70), around(300, 40, 30)};
  const std::vector<double> v = {-80.0, -85.0, -95.0, -70.0};
  GeoLocation target = around(60, 12, 50);
  const KrigingSolution a = solve_kriging(kVariogram, target, locs, v);
  for (auto& l : locs) l.alt_m += 37.0;
  target.alt_m += 37.0;
  const KrigingSolution b = solve_kriging(kVariogram, target, locs, v);
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(a.weights[i], b.weights[i], 1e-12);
}

TEST(SolveKriging, DuplicateLocations) {
  const GeoLocation l = around(30, 10, 50);
  const std::vector<GeoLocation> locs = {l, l, around(200, 20, 50)};
  const std::vector<double> v = {-80.0, -82.0, -90.0};
  try {
    solve_kriging(kVariogram, around(0, 3, 50), locs, v);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularSystem);
  }
  Variogram nug = kVariogram;
  nug.nugget = 0.1;
  const KrigingSolution sol = solve_kriging(nug, around(0, 3, 50), locs, v);
  EXPECT_NEAR(sol.weights[0], sol.weights[1], 1e-9);
}

TEST(SolveKriging, EmptyAndMismatchedInputs) {
  EXPECT_THROW(solve_kriging(kVariogram, testing::site(30.0), {}, {}), Error);
  const std::vector<GeoLocation> locs = {around(0, 1, 30)};
  EXPECT_THROW(solve_kriging(kVariogram, testing::site(30.0), locs, std::vector<double>{1.0, 2.0}), Error);
}

TEST(SelectNeighbors, MatchesBruteForce) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> brg(0.0, 360.0), dist(0.0, 150.0), alt(10.0, 150.0);
  std::vector<GeoLocation> pool;
  for (int i = 0; i < 400; ++i) pool.push_back(around(brg(rng), dist(rng), alt(rng)));
  for (int rep = 0; rep < 20; ++rep) {
    const GeoLocation t = around(brg(rng), dist(rng), alt(rng));
    const std::size_t cap = 1 + static_cast<std::size_t>(rep) * 7;
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const double d = std::hypot(horizontal_distance(t, pool[i]), t.alt_m - pool[i].alt_m);
      if (d <= 60.0) all.emplace_back(d, i);
    }
    std::sort(all.begin(), all.end());
    if (all.size() > cap) all.resize(cap);
    const auto got = select_neighbors(t, pool, 60.0, cap);
    ASSERT_EQ(got.size(), all.size());
    for (std::size_t k = 0; k < got.size(); ++k) EXPECT_EQ(got[k], all[k].second);
  }
}

TEST(SelectNeighbors, NothingInRange) {
  const std::vector<GeoLocation> pool = {around(0, 500, 30)};
  try {
    select_neighbors(testing::site(30.0), pool, 100.0, 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoNeighbors);
  }
  EXPECT_THROW(select_neighbors(testing::site(30.0), pool, 0.0, 10), Error);
}

MeasurementSet pool_of(std::size_t n, std::uint64_t seed, double constant = NAN) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> brg(0.0, 360.0), dist(0.0, 90.0), val(-100.0, -60.0);
  MeasurementSet set;
  set.calibrated = true;
  for (std::size_t i = 0; i < n; ++i) {
    Sample s;
    s.t_s = static_cast<double>(i);
    s.flight_id = 1 + static_cast<int>(i % 2);
    s.loc = around(brg(rng), dist(rng), s.flight_id == 1 ? 30.0 : 50.0);
    s.rsrp_dbm = std::isnan(constant) ? val(rng) : constant;
    set.samples.push_back(s);
  }
  return set;
}

KrigingOptions options() {
  KrigingOptions opt;
  opt.variogram = kVariogram;
  opt.r0_m = 100.0;
  opt.m_max = 50;
  return opt;
}

TEST(Predict, FallsBackToTheTrendWithoutNeighbours) {
  const MeasurementSet pool = pool_of(20, 1);
  KrigingOptions opt = options();
  const GeoLocation far = around(0, 5000, 50);
  EXPECT_THROW(predict(opt, pool, far), Error);
  opt.trend = PathLossTrend{PropagationConfig{}, testing::site(10.0), PathLossModel::TwoRay};
  const Prediction p = predict(opt, pool, far);
  EXPECT_TRUE(p.fallback);
  EXPECT_EQ(p.neighbor_count, 0u);
  EXPECT_DOUBLE_EQ(p.predicted_dbm, (*opt.trend)(far));
}

TEST(Predict, ResidualModeAddsTheTrendBack) {
  KrigingOptions opt = options();
  opt.mode = KrigingMode::Residual;
  opt.trend = PathLossTrend{PropagationConfig{}, testing::site(10.0), PathLossModel::TwoRay};
  MeasurementSet pool = pool_of(30, 2);
  for (auto& s : pool.samples) s.rsrp_dbm = (*opt.trend)(s.loc) + 4.0;
  const GeoLocation t = around(77, 20, 40);
  EXPECT_NEAR(predict(opt, pool, t).predicted_dbm, (*opt.trend)(t) + 4.0, 1e-8);
}

TEST(PredictTargets, LeavesTheTargetOut) {
  const MeasurementSet pool = pool_of(40, 3);
  const auto preds = predict_targets(options(), pool, pool);
  ASSERT_EQ(preds.size(), pool.size());
  // the sample itself would reproduce its value exactly; left out it cannot
  std::size_t differing = 0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (std::abs(preds[i].predicted_dbm - pool[i].rsrp_dbm) > 1e-6) ++differing;
    EXPECT_LE(preds[i].neighbor_count, pool.size() - 1);
  }
  EXPECT_GT(differing, pool.size() / 2);
}

TEST(CrossValidate, ConstantFieldHasZeroError) {
  const MeasurementSet pool = pool_of(200, 4, -77.0);
  const RmseSummary s = cross_validate(options(), pool, pool, 50, 20, 30, 9);
  EXPECT_EQ(s.rmse.size(), 30u);
  for (double r : s.rmse) EXPECT_NEAR(r, 0.0, 1e-9);
  EXPECT_EQ(s.m, 50u);
  EXPECT_EQ(s.n0, 20u);
}

TEST(CrossValidate, SeededAndReproducible) {
  const MeasurementSet pool = pool_of(300, 5);
  const MeasurementSet targets = pool_of(100, 6);
  const RmseSummary a = cross_validate(options(), pool, targets, 100, 30, 25, 42);
  const RmseSummary b = cross_validate(options(), pool, targets, 100, 30, 25, 42);
  const RmseSummary c = cross_validate(options(), pool, targets, 100, 30, 25, 43);
  EXPECT_EQ(a.rmse, b.rmse);
  EXPECT_NE(a.rmse, c.rmse);
  EXPECT_LE(a.q25, a.median);
  EXPECT_LE(a.median, a.q75);
}

TEST(CrossValidate, TooFewSamples) {
  const MeasurementSet pool = pool_of(10, 7);
  try {
    cross_validate(options(), pool, pool, 100, 5, 1, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientData);
  }
}

TEST(Rmse, Basics) {
  EXPECT_DOUBLE_EQ(rmse(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0, 4.0}), std::sqrt(2.0));
  EXPECT_THROW(rmse(std::vector<double>{}, std::vector<double>{}), Error);
  EXPECT_DOUBLE_EQ(quantile({4.0, 1.0, 3.0, 2.0}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile({4.0, 1.0, 3.0, 2.0}, 0.25), 1.75);
  ShadowingStats st;
  st.std_db = 6.9;
  EXPECT_DOUBLE_EQ(baseline_rmse(st), 6.9);
}

TEST(RadioMap, GridAndEmptyPool) {
  MapGrid grid;
  grid.lat_min_deg = 35.7270;
  grid.lat_max_deg = 35.7280;
  grid.lat_step_deg = 0.0005;
  grid.lon_min_deg = -78.6965;
  grid.lon_max_deg = -78.6955;
  grid.lon_step_deg = 0.0005;
  grid.alt_min_m = 30.0;
  grid.alt_max_m = 50.0;
  grid.alt_step_m = 20.0;
  EXPECT_EQ(grid_nodes(grid).size(), 18u);
  EXPECT_THROW(generate_radio_map(options(), MeasurementSet{}, grid), Error);

  const MeasurementSet pool = pool_of(100, 8);
  const auto cells = generate_radio_map(options(), pool, grid);
  ASSERT_EQ(cells.size(), 18u);
  for (const auto& c : cells) {
    EXPECT_TRUE(std::isfinite(c.predicted_dbm));
    EXPECT_FALSE(c.fallback);
  }
}

}  // namespace
}  // namespace a2gmap
