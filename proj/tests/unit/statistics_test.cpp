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

#include <cmath>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "a2gmap/error.hpp"
#include "a2gmap/statistics.hpp"
#include "test_support.hpp"

namespace a2gmap {
namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;

// Skew-normal draws through the half-normal construction.
std::vector<double> skew_normal_draws(std::size_t n, double xi, double omega, double alpha, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  const double delta = alpha / std::sqrt(1.0 + alpha * alpha);
  std::vector<double> out(n);
  for (double& x : out) {
    const double u0 = z(rng), u1 = z(rng);
    x = xi + omega * (delta * std::abs(u0) + std::sqrt(1.0 - delta * delta) * u1);
  }
  return out;
}

TEST(SkewNormal, DensityIntegratesToOne) {
  for (const auto& [xi, omega, alpha] : {std::tuple{0.0, 1.0, 0.0}, std::tuple{-4.26, 7.14, -2.13},
                                         std::tuple{3.0, 0.5, 5.0}, std::tuple{1.0, 10.0, -6.0}}) {
    const double mass = testing::simpson([&](double x) { return skew_normal_pdf(x, xi, omega, alpha); },
                                         xi - 12.0 * omega, xi + 12.0 * omega, 4000);
    EXPECT_NEAR(mass, 1.0, 1e-9) << xi << " " << omega << " " << alpha;
  }
}

TEST(SkewNormal, ZeroShapeIsTheNormalDensity) {
  for (double x : {-3.0, -0.5, 0.0, 2.0}) {
    EXPECT_NEAR(skew_normal_pdf(x, 1.0, 2.0, 0.0), kInvSqrt2Pi / 2.0 * std::exp(-0.125 * (x - 1.0) * (x - 1.0)),
                1e-15);
  }
}

TEST(SkewNormal, RejectsNonPositiveScale) {
  for (double omega : {0.0, -1.0}) {
    try {
      skew_normal_pdf(0.0, 0.0, omega, 1.0);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidScale);
    }
  }
}

TEST(SkewNormal, MomentMatchingReproducesTheReferenceRow) {
  // 30 m row: mean -4.26 dB, std 7.14 dB, alpha -2.13
  const SkewNormalParams p = skew_normal_from_moments(-4.26, 7.14, -2.13);
  const auto f = [&](double x) { return skew_normal_pdf(x, p.xi, p.omega, p.alpha); };
  const double lo = p.xi - 15.0 * p.omega, hi = p.xi + 15.0 * p.omega;
  const double mean = testing::simpson([&](double x) { return x * f(x); }, lo, hi, 6000);
  const double var = testing::simpson([&](double x) { return (x - mean) * (x - mean) * f(x); }, lo, hi, 6000);
  EXPECT_NEAR(mean, -4.26, 1e-8);
  EXPECT_NEAR(std::sqrt(var), 7.14, 1e-8);
  EXPECT_DOUBLE_EQ(p.alpha, -2.13);
}

TEST(Gaussian, PopulationMoments) {
  const std::vector<double> w = {1.0, 2.0, 3.0, 4.0};
  const GaussianFit g = fit_gaussian(w);
  EXPECT_DOUBLE_EQ(g.mean_db, 2.5);
  EXPECT_NEAR(g.std_db, std::sqrt(1.25), 1e-15);
  EXPECT_FALSE(g.degenerate);
  EXPECT_TRUE(fit_gaussian(std::vector<double>{3.0, 3.0}).degenerate);
  EXPECT_THROW(fit_gaussian(std::vector<double>{1.0}), Error);
}

TEST(Gaussian, RecoversTheNinetyMetreSpread) {
  std::mt19937_64 rng(90);
  std::normal_distribution<double> n(-0.32, 6.90);
  std::vector<double> w(200000);
  for (double& x : w) x = n(rng);
  const GaussianFit g = fit_gaussian(w);
  EXPECT_NEAR(g.std_db, 6.90, 0.069);
  EXPECT_NEAR(g.mean_db, -0.32, 0.05);
}

TEST(SkewFit, RecoversNegativeShape) {
  const auto w = skew_normal_draws(100000, 2.0, 8.0, -2.0, 5);
  const ShadowingStats s = fit_skew_normal(w);
  EXPECT_GE(s.alpha, -2.5);
  EXPECT_LE(s.alpha, -1.5);
  EXPECT_LT(s.nmse_skewed, s.nmse_gaussian);
  EXPECT_EQ(s.samples, w.size());
  EXPECT_GT(s.skew_z, kSkewSignificance);
}

TEST(SkewFit, SymmetricInputGivesSmallShape) {
  const auto w = skew_normal_draws(100000, 0.0, 6.9, 0.0, 6);
  EXPECT_LT(std::abs(fit_skew_normal(w).alpha), 0.3);
}

// Below the significance threshold the fit falls back to the Gaussian.
TEST(SkewFit, InsignificantSkewRevertsToGaussian) {
  const auto w = skew_normal_draws(2000, 0.0, 6.9, 0.0, 11);
  const ShadowingStats s = fit_skew_normal(w);
  if (s.skew_z < kSkewSignificance) {
    EXPECT_EQ(s.alpha, 0.0);
    EXPECT_EQ(s.nmse_skewed, s.nmse_gaussian);
    EXPECT_DOUBLE_EQ(s.xi, s.mean_db);
    EXPECT_DOUBLE_EQ(s.omega, s.std_db);
  } else {
    EXPECT_NE(s.alpha, 0.0);
  }
}

TEST(SkewFit, NeedsEnoughSamples) {
  EXPECT_THROW(fit_skew_normal(std::vector<double>(99, 1.0)), Error);
  EXPECT_THROW(fit_skew_normal(std::vector<double>(500, 1.0)), Error);
}

TEST(Histogram, DensityNormalization) {
  const auto w = skew_normal_draws(5000, 0.0, 1.0, 1.0, 2);
  const Histogram h = density_histogram(w, 40);
  ASSERT_EQ(h.centers.size(), 40u);
  const double width = h.centers[1] - h.centers[0];
  double area = 0.0;
  for (double d : h.density) area += d * width;
  EXPECT_NEAR(area, 1.0, 1e-12);
}

TEST(PairCorrelation, Formula) {
  EXPECT_NEAR(pair_correlation(3.0, -1.0, {1.0, 2.0}, {0.0, 4.0}), (2.0 * -1.0) / 8.0, 1e-15);
  EXPECT_THROW(pair_correlation(1.0, 1.0, {0.0, 0.0}, {0.0, 1.0}), Error);
}

FlightShadowing random_flight(int id, double height, std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> off(0.0, 40.0), brg(0.0, 360.0);
  std::normal_distribution<double> w(0.0, 5.0);
  std::vector<GeoLocation> locs;
  std::vector<double> ws;
  for (std::size_t i = 0; i < n; ++i) {
    GeoLocation p = destination(testing::site(), brg(rng), off(rng));
    p.alt_m = height;
    locs.push_back(p);
    ws.push_back(w(rng));
  }
  return make_flight_shadowing(id, height, locs, ws);
}

TEST(HorizontalCorrelation, MatchesBruteForce) {
  std::mt19937_64 rng(4);
  const std::vector<FlightShadowing> flights = {random_flight(1, 30.0, 120, rng), random_flight(2, 50.0, 90, rng)};
  const double bin = 2.0;

  std::map<std::size_t, std::vector<double>> per_bin;  // bin -> per-flight averages
  std::map<std::size_t, std::uint64_t> counts;
  for (const auto& f : flights) {
    double mean = 0.0;
    for (double w : f.w_db) mean += w;
    mean /= static_cast<double>(f.w_db.size());
    double var = 0.0;
    for (double w : f.w_db) var += (w - mean) * (w - mean);
    const double sd = std::sqrt(var / static_cast<double>(f.w_db.size()));
    std::map<std::size_t, std::pair<double, std::uint64_t>> acc;
    for (std::size_t i = 0; i < f.w_db.size(); ++i) {
      for (std::size_t j = i + 1; j < f.w_db.size(); ++j) {
        const auto k = static_cast<std::size_t>(horizontal_distance(f.locations[i], f.locations[j]) / bin);
        acc[k].first += (f.w_db[i] - mean) * (f.w_db[j] - mean) / (sd * sd);
        ++acc[k].second;
      }
    }
    for (const auto& [k, a] : acc) {
      per_bin[k].push_back(a.first / static_cast<double>(a.second));
      counts[k] += a.second;
    }
  }

  const CorrelationCurve curve = horizontal_correlation(flights, bin);
  ASSERT_EQ(curve.size(), per_bin.size());
  std::size_t idx = 0;
  for (const auto& [k, vals] : per_bin) {
    double avg = 0.0;
    for (double v : vals) avg += v;
    avg /= static_cast<double>(vals.size());
    EXPECT_NEAR(curve.values[idx], avg, 1e-12);
    EXPECT_EQ(curve.counts[idx], counts[k]);
    EXPECT_DOUBLE_EQ(curve.bin_centers_m[idx], (static_cast<double>(k) + 0.5) * bin);
    EXPECT_GE(curve.mean_distance_m[idx], static_cast<double>(k) * bin);
    EXPECT_LT(curve.mean_distance_m[idx], static_cast<double>(k + 1) * bin);
    ++idx;
  }
}

TEST(Semivariogram, MatchesBruteForce) {
  std::mt19937_64 rng(8);
  const std::vector<FlightShadowing> flights = {random_flight(1, 30.0, 80, rng)};
  const auto& f = flights[0];
  std::map<std::size_t, std::pair<double, std::uint64_t>> acc;
  for (std::size_t i = 0; i < f.w_db.size(); ++i) {
    for (std::size_t j = i + 1; j < f.w_db.size(); ++j) {
      const auto k = static_cast<std::size_t>(horizontal_distance(f.locations[i], f.locations[j]) / 2.0);
      acc[k].first += 0.5 * (f.w_db[i] - f.w_db[j]) * (f.w_db[i] - f.w_db[j]);
      ++acc[k].second;
    }
  }
  const CorrelationCurve sv = empirical_semivariogram(flights, 2.0);
  ASSERT_EQ(sv.size(), acc.size());
  std::size_t idx = 0;
  for (const auto& [k, a] : acc) EXPECT_NEAR(sv.values[idx++], a.first / static_cast<double>(a.second), 1e-10);
}

TEST(VerticalCorrelation, IdenticalFlightsCorrelatePerfectly) {
  std::mt19937_64 rng(12);
  FlightShadowing a = random_flight(1, 30.0, 60, rng);
  FlightShadowing b = make_flight_shadowing(2, 50.0, a.locations, a.w_db);
  for (auto& l : b.locations) l.alt_m = 50.0;
  const std::vector<FlightShadowing> flights = {a, b};
  const VerticalCorrelation vc = vertical_correlation(flights, 3.0);
  EXPECT_NEAR(vc.at(0, 1), 1.0, 1e-12);
  EXPECT_NEAR(vc.at(0, 0), 1.0, 1e-12);
  EXPECT_EQ(vc.matched_pairs[1], 60u);
}

TEST(VerticalCorrelation, DisjointTracksHaveNoOverlap) {
  std::mt19937_64 rng(13);
  const FlightShadowing a = random_flight(1, 30.0, 60, rng);
  FlightShadowing b = a;
  b.flight_id = 2;
  for (auto& l : b.locations) l = destination(l, 90.0, 500.0);
  try {
    matched_correlation(a, b, 3.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoOverlap);
  }
}

VerticalCorrelation reference_vertical() {
  VerticalCorrelation vc;
  vc.heights_m = {30.0, 50.0, 70.0, 90.0, 110.0};
  vc.values = {1.003,  0.247, 0.080, -0.024, -0.040, 0.247,  1.004, 0.214, 0.057,
               -0.002, 0.080, 0.214, 1.003,  0.307,  0.172,  -0.024, 0.057, 0.307,
               1.001,  0.409, -0.040, -0.002, 0.172,  0.409,  1.012};
  vc.matched_pairs.assign(25, 100);
  return vc;
}

TEST(VerticalCorrelation, AveragesByOffset) {
  const auto pts = average_by_vertical_distance(reference_vertical());
  ASSERT_EQ(pts.size(), 4u);
  EXPECT_DOUBLE_EQ(pts[0].first, 20.0);
  EXPECT_NEAR(pts[0].second, (0.247 + 0.214 + 0.307 + 0.409) / 4.0, 1e-15);
  EXPECT_NEAR(pts[1].second, (0.080 + 0.057 + 0.172) / 3.0, 1e-15);
  EXPECT_NEAR(pts[3].second, -0.040, 1e-15);
}

TEST(VerticalFit, ReferencePointsGiveTheReportedScale) {
  const auto pts = average_by_vertical_distance(reference_vertical());
  const double d_cor = fit_exponential_vertical(pts);
  EXPECT_GE(d_cor, 9.0);
  EXPECT_LE(d_cor, 14.0);
}

TEST(VerticalFit, ExactDataIsRecovered) {
  std::vector<std::pair<double, double>> pts;
  for (double dv : {20.0, 40.0, 60.0, 80.0}) pts.emplace_back(dv, exponential_vertical(dv, 11.24));
  EXPECT_NEAR(fit_exponential_vertical(pts), 11.24, 1e-6);
  EXPECT_THROW(fit_exponential_vertical(std::vector<std::pair<double, double>>{}), Error);
}

TEST(Model, HalfCorrelationAtTheVerticalScale) {
  EXPECT_NEAR(exponential_vertical(11.24, 11.24), 0.5, 1e-12);
  const CorrelationModel3D m;
  EXPECT_NEAR(eval_correlation_3d(m, 11.24, 0.0), 0.5, 1e-12);
  EXPECT_EQ(eval_correlation_3d(m, 0.0, 0.0), 1.0);
}

TEST(Model, HorizontalHalfCorrelationNearFourPointFive) {
  const CorrelationModel3D m;
  EXPECT_NEAR(eval_correlation_3d(m, 0.0, 4.5), 0.494, 1e-3);
  double lo = 0.0, hi = 50.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (eval_correlation_3d(m, 0.0, mid) > 0.5 ? lo : hi) = mid;
  }
  EXPECT_NEAR(lo, 4.5, 0.5);
}

TEST(Model, Separable) {
  const CorrelationModel3D m;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dv(0.0, 200.0), dh(0.0, 2000.0);
  for (int i = 0; i < 1000; ++i) {
    const double v = dv(rng), h = dh(rng);
    EXPECT_NEAR(eval_correlation_3d(m, v, h), eval_correlation_3d(m, v, 0.0) * eval_correlation_3d(m, 0.0, h),
                1e-12);
  }
}

TEST(Model, Validation) {
  CorrelationModel3D m;
  EXPECT_NO_THROW(validate(m));
  m.a = 1.2;
  EXPECT_THROW(validate(m), Error);
  m = {};
  m.d_cor_m = 0.0;
  EXPECT_THROW(validate(m), Error);
  m = {};
  m.sigma_w2 = -1.0;
  EXPECT_THROW(validate(m), Error);
}

CorrelationCurve exact_curve(double a, double b1, double b2) {
  CorrelationCurve c;
  for (int k = 0; k < 100; ++k) {
    const double d = 2.0 * k + 1.0;
    c.bin_centers_m.push_back(d);
    c.mean_distance_m.push_back(d);
    c.values.push_back(biexponential(a, b1, b2, d));
    c.counts.push_back(1000 - 5 * static_cast<std::uint64_t>(k));
  }
  return c;
}

TEST(BiExponentialFit, RecoversReferenceParameters) {
  const BiExponentialFit fit = fit_biexponential(exact_curve(0.3, 0.02815, 0.2474), 10);
  EXPECT_NEAR(fit.a, 0.3, 0.003);
  EXPECT_NEAR(fit.b1, 0.02815, 0.02815 * 0.01);
  EXPECT_NEAR(fit.b2, 0.2474, 0.2474 * 0.01);
  EXPECT_LT(fit.cost, 1e-10);
}

TEST(BiExponentialFit, FixedWeightRecoversRates) {
  const BiExponentialFit fit = fit_biexponential_fixed_a(exact_curve(0.3, 0.05988, 0.03574 * 5.0), 0.3);
  EXPECT_DOUBLE_EQ(fit.a, 0.3);
  EXPECT_NEAR(fit.b1, 0.05988, 0.05988 * 0.01);
  EXPECT_NEAR(fit.b2, 0.1787, 0.1787 * 0.01);
}

TEST(BiExponentialFit, NeedsFiveBins) {
  CorrelationCurve c = exact_curve(0.3, 0.02815, 0.2474);
  c.values.resize(4);
  c.counts.resize(4);
  c.bin_centers_m.resize(4);
  c.mean_distance_m.resize(4);
  EXPECT_THROW(fit_biexponential(c), Error);
}

}  // namespace
}  // namespace a2gmap
