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

#ifndef A2GMAP_STATISTICS_HPP
#define A2GMAP_STATISTICS_HPP

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "a2gmap/geo.hpp"

namespace a2gmap {

// ---------------------------------------------------------------------------
// Marginal distribution of the shadowing component
// ---------------------------------------------------------------------------

struct Moments {
  double mean_db = 0.0;
  double std_db = 0.0;
};

struct GaussianFit {
  double mean_db = 0.0;
  double std_db = 0.0;  // population-normalized (divides by n)
  bool degenerate = false;  // std == 0
};

// Throws Error(TooFewSamples) below two samples.
GaussianFit fit_gaussian(std::span<const double> w);

// Skew-normal density 2/omega * phi(z) * Phi(alpha z), z = (x - xi) / omega.
// Throws Error(InvalidScale) unless omega > 0.
double skew_normal_pdf(double x, double xi, double omega, double alpha);

// Location and scale reproducing a given mean and standard deviation for a
// fixed shape alpha.
struct SkewNormalParams {
  double xi = 0.0;
  double omega = 1.0;
  double alpha = 0.0;
};
SkewNormalParams skew_normal_from_moments(double mean, double std_dev, double alpha);

struct ShadowingStats {
  double mean_db = 0.0;
  double std_db = 0.0;
  double alpha = 0.0;
  double xi = 0.0;
  double omega = 0.0;
  double nmse_gaussian = 0.0;
  double nmse_skewed = 0.0;
  // NMSE improvement of the best skewed fit over the Gaussian, in standard
  // deviations of its sampling noise.
  double skew_z = 0.0;
  std::size_t samples = 0;
};

// Below this many noise standard deviations the Gaussian (alpha = 0) is kept.
inline constexpr double kSkewSignificance = 1.5;

// Normalized mean-squared error between a density-normalized histogram and a
// pdf sampled at the bin centres: sum (h - f)^2 / sum h^2.
struct Histogram {
  std::vector<double> centers;
  std::vector<double> density;
};
Histogram density_histogram(std::span<const double> w, std::size_t bins);

// Grid search alpha in [-6, 6] (step 0.01) with (xi, omega) moment-matched
// for every alpha; keeps the alpha with the lowest NMSE against the
// histogram unless its gain over alpha = 0 is within sampling noise
// (skew_z < kSkewSignificance). Needs at least 100 samples.
ShadowingStats fit_skew_normal(std::span<const double> w, std::size_t histogram_bins = 50);

// ---------------------------------------------------------------------------
// Empirical spatial correlation
// ---------------------------------------------------------------------------

// (w_i - mean_i)(w_j - mean_j) / (std_i std_j). Throws Error(DegenerateStd).
double pair_correlation(double w_i, double w_j, const Moments& stats_i, const Moments& stats_j);

// Shadowing samples of one fixed-height flight and the statistics used to
// normalize them.
struct FlightShadowing {
  int flight_id = 0;
  double height_m = 0.0;
  std::vector<GeoLocation> locations;
  std::vector<double> w_db;
  Moments stats;
};

// Fills `stats` with the flight's own population mean and std.
FlightShadowing make_flight_shadowing(int flight_id, double height_m, std::vector<GeoLocation> locations,
                                      std::vector<double> w_db);

struct CorrelationCurve {
  std::vector<double> bin_centers_m;    // nominal bin centres
  std::vector<double> mean_distance_m;  // pair-averaged distance inside each bin
  std::vector<double> values;
  std::vector<std::uint64_t> counts;

  std::size_t size() const noexcept { return values.size(); }
};

// All intra-flight sample pairs binned by horizontal distance in `bin_m`
// steps starting at 0, averaged per bin, then averaged across flights per
// bin. Empty bins are dropped.
CorrelationCurve horizontal_correlation(std::span<const FlightShadowing> flights, double bin_m = 2.0);

// Cross-flight pairs (every sample of `a` against every sample of `b`)
// binned by horizontal distance. When `a` and `b` are the same flight,
// self-pairs are skipped.
CorrelationCurve cross_flight_correlation(const FlightShadowing& a, const FlightShadowing& b, double bin_m = 2.0);

// Position-matched correlation between flights: each sample of the first
// flight is paired with the horizontally nearest sample of the second, pairs
// farther apart than `dh_max_m` are discarded, and the pair correlations are
// averaged.
struct VerticalCorrelation {
  std::vector<double> heights_m;
  std::vector<double> values;               // row-major heights x heights
  std::vector<std::uint64_t> matched_pairs;  // same layout

  double at(std::size_t i, std::size_t j) const { return values[i * heights_m.size() + j]; }
};

// Throws Error(NoOverlap) when fewer than 10 pairs survive.
double matched_correlation(const FlightShadowing& a, const FlightShadowing& b, double dh_max_m,
                           std::uint64_t* matched = nullptr);
VerticalCorrelation vertical_correlation(std::span<const FlightShadowing> flights, double dh_max_m = 3.0);

// Off-diagonal entries of `vc` grouped by |h_i - h_j| (rounded to 1e-6 m) and
// averaged; returns (d_v, mean correlation) sorted by d_v.
std::vector<std::pair<double, double>> average_by_vertical_distance(const VerticalCorrelation& vc);

// Cross-flight curves for every unordered flight pair, grouped by vertical
// offset and averaged per bin across pairs sharing that offset.
std::map<double, CorrelationCurve> correlation_3d(std::span<const FlightShadowing> flights, double bin_m = 2.0);

// Binned semi-variogram 0.5 * mean((z_i - z_j)^2) with z the de-meaned
// shadowing, over intra-flight pairs.
CorrelationCurve empirical_semivariogram(std::span<const FlightShadowing> flights, double bin_m = 2.0);

// ---------------------------------------------------------------------------
// Correlation models
// ---------------------------------------------------------------------------

struct BiExponentialFit {
  double a = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
  double cost = 0.0;  // count-weighted mean squared residual
};

// a e^{-b1 d} + (1 - a) e^{-b2 d}
double biexponential(double a, double b1, double b2, double d) noexcept;

// Bounded least squares (a in [0, 1], b1, b2 > 0) with count-weighted
// residuals. Multi-start projected Levenberg-Marquardt; the result is
// reported with b1 <= b2. Needs >= 5 bins.
BiExponentialFit fit_biexponential(const CorrelationCurve& curve, int random_starts = 10);

// Same model with the mixture weight held at `a`.
BiExponentialFit fit_biexponential_fixed_a(const CorrelationCurve& curve, double a);

// exp(-(d_v / d_cor) ln 2)
double exponential_vertical(double d_v, double d_cor_m) noexcept;

// Least-squares d_cor over (d_v, R) points; needs >= 1 point with d_v > 0
// and R > 0 somewhere. Throws Error(FitDiverged) when no finite minimum.
double fit_exponential_vertical(std::span<const std::pair<double, double>> points);

struct CorrelationModel3D {
  double a = 0.3;
  double b1 = 0.02815;
  double b2 = 0.2474;
  double d_cor_m = 11.24;
  double sigma_w2 = 6.9 * 6.9;
};

void validate(const CorrelationModel3D& model);

// exp(-(d_v/d_cor) ln 2) (a e^{-b1 d_h} + (1 - a) e^{-b2 d_h})
double eval_correlation_3d(const CorrelationModel3D& model, double d_v, double d_h) noexcept;

// ---------------------------------------------------------------------------
// End-to-end estimation of the 3D model from per-flight shadowing
// ---------------------------------------------------------------------------

struct CorrelationEstimateOptions {
  double bin_m = 2.0;
  double dh_max_m = 3.0;
  double fixed_a = 0.3;
  int random_starts = 10;
  double fallback_d_cor_m = 11.24;  // used with fewer than two flights
};

struct CorrelationEstimate {
  CorrelationCurve horizontal;
  BiExponentialFit horizontal_fit;        // free mixture weight
  BiExponentialFit horizontal_fixed_a;    // weight held at fixed_a
  VerticalCorrelation vertical;
  std::vector<std::pair<double, double>> vertical_points;  // (d_v, mean R)
  bool vertical_fitted = false;
  std::map<double, CorrelationCurve> curves_3d;            // by d_v
  std::map<double, BiExponentialFit> fits_3d;              // weight held at fixed_a
  CorrelationModel3D model;
};

// Horizontal curve and fits, vertical matrix and d_cor, cross-height curves,
// and the combined model with sigma_w^2 the mean per-flight variance.
CorrelationEstimate estimate_correlation_model(std::span<const FlightShadowing> flights,
                                               const CorrelationEstimateOptions& options = {});

}  // namespace a2gmap

#endif  // A2GMAP_STATISTICS_HPP
