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
#include <array>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "a2gmap/error.hpp"
#include "a2gmap/statistics.hpp"

namespace a2gmap {

namespace {

constexpr double kMinRate = 1e-9;
constexpr double kMaxRate = 1e3;

struct WeightedPoints {
  std::vector<double> d;
  std::vector<double> y;
  std::vector<double> w;  // normalized to sum 1
};

WeightedPoints weighted_points(const CorrelationCurve& curve) {
  if (curve.size() < 5) throw Error(ErrorCode::InsufficientData, "bi-exponential fit needs at least 5 bins");
  WeightedPoints p;
  double total = 0.0;
  for (std::size_t k = 0; k < curve.size(); ++k) {
    const double d = curve.mean_distance_m.empty() ? curve.bin_centers_m[k] : curve.mean_distance_m[k];
    p.d.push_back(d);
    p.y.push_back(curve.values[k]);
    p.w.push_back(static_cast<double>(curve.counts[k]));
    total += p.w.back();
  }
  for (double& w : p.w) w /= total;
  return p;
}

// Projected Levenberg-Marquardt over (a, b1, b2); entries with fixed[i] set
// are held constant.
struct LmResult {
  std::array<double, 3> p;
  double cost;
};

double cost_of(const WeightedPoints& pts, const std::array<double, 3>& p) {
  double c = 0.0;
  for (std::size_t k = 0; k < pts.d.size(); ++k) {
    const double r = biexponential(p[0], p[1], p[2], pts.d[k]) - pts.y[k];
    c += pts.w[k] * r * r;
  }
  return c;
}

std::array<double, 3> project(std::array<double, 3> p) {
  p[0] = std::clamp(p[0], 0.0, 1.0);
  p[1] = std::clamp(p[1], kMinRate, kMaxRate);
  p[2] = std::clamp(p[2], kMinRate, kMaxRate);
  return p;
}

LmResult levenberg_marquardt(const WeightedPoints& pts, std::array<double, 3> p, std::array<bool, 3> fixed) {
  p = project(p);
  double cost = cost_of(pts, p);
  double lambda = 1e-3;
  for (int iter = 0; iter < 500; ++iter) {
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
    for (std::size_t k = 0; k < pts.d.size(); ++k) {
      const double d = pts.d[k];
      const double e1 = std::exp(-p[1] * d);
      const double e2 = std::exp(-p[2] * d);
      const double r = p[0] * e1 + (1.0 - p[0]) * e2 - pts.y[k];
      Eigen::Vector3d g(e1 - e2, -p[0] * d * e1, -(1.0 - p[0]) * d * e2);
      for (int i = 0; i < 3; ++i) {
        if (fixed[i]) g[i] = 0.0;
      }
      jtj += pts.w[k] * g * g.transpose();
      jtr += pts.w[k] * r * g;
    }
    for (int i = 0; i < 3; ++i) {
      if (fixed[i]) jtj(i, i) = 1.0;
    }
    bool improved = false;
    while (lambda < 1e12) {
      Eigen::Matrix3d a = jtj;
      for (int i = 0; i < 3; ++i) a(i, i) += lambda * std::max(jtj(i, i), 1e-12);
      const Eigen::Vector3d step = a.ldlt().solve(-jtr);
      std::array<double, 3> trial = p;
      for (int i = 0; i < 3; ++i) {
        if (!fixed[i]) trial[i] += step[i];
      }
      trial = project(trial);
      const double c = cost_of(pts, trial);
      if (std::isfinite(c) && c < cost) {
        const double rel = (cost - c) / std::max(cost, 1e-300);
        p = trial;
        cost = c;
        lambda = std::max(lambda * 0.3, 1e-12);
        improved = true;
        if (rel < 1e-15 || cost < 1e-30) return {p, cost};
        break;
      }
      lambda *= 10.0;
    }
    if (!improved) break;
  }
  return {p, cost};
}

BiExponentialFit canonical(const LmResult& r) {
  BiExponentialFit f{r.p[0], r.p[1], r.p[2], r.cost};
  if (f.b1 > f.b2) {
    std::swap(f.b1, f.b2);
    f.a = 1.0 - f.a;
  }
  return f;
}

}  // namespace

double biexponential(double a, double b1, double b2, double d) noexcept {
  // Written so that d = 0 yields exactly 1 for any a.
  const double e2 = std::exp(-b2 * d);
  return e2 + a * (std::exp(-b1 * d) - e2);
}

BiExponentialFit fit_biexponential(const CorrelationCurve& curve, int random_starts) {
  const WeightedPoints pts = weighted_points(curve);
  std::vector<std::array<double, 3>> starts = {
      {0.3, 0.03, 0.25}, {0.5, 0.01, 0.1}, {0.5, 0.1, 1.0}, {0.9, 0.05, 0.5}, {0.1, 0.005, 0.05}};
  boost::random::mt19937_64 rng(0x5eed5eedULL);
  boost::random::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 0; s < random_starts; ++s) {
    const double a = unit(rng);
    const double b1 = std::pow(10.0, -3.0 + 3.5 * unit(rng));
    const double b2 = std::pow(10.0, -3.0 + 3.5 * unit(rng));
    starts.push_back({a, b1, b2});
  }
  LmResult best{{0.0, 0.0, 0.0}, std::numeric_limits<double>::infinity()};
  for (const auto& s : starts) {
    const LmResult r = levenberg_marquardt(pts, s, {false, false, false});
    if (r.cost < best.cost) best = r;
  }
  if (!std::isfinite(best.cost)) throw Error(ErrorCode::FitDiverged, "bi-exponential fit did not converge");
  return canonical(best);
}

BiExponentialFit fit_biexponential_fixed_a(const CorrelationCurve& curve, double a) {
  if (!(a >= 0.0 && a <= 1.0)) throw Error(ErrorCode::InvalidConfig, "mixture weight must lie in [0, 1]");
  const WeightedPoints pts = weighted_points(curve);
  LmResult best{{a, 0.0, 0.0}, std::numeric_limits<double>::infinity()};
  const double grid[] = {1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.3, 1.0};
  for (double b1 : grid) {
    for (double b2 : grid) {
      const LmResult r = levenberg_marquardt(pts, {a, b1, b2}, {true, false, false});
      if (r.cost < best.cost) best = r;
    }
  }
  if (!std::isfinite(best.cost)) throw Error(ErrorCode::FitDiverged, "bi-exponential fit did not converge");
  return {best.p[0], best.p[1], best.p[2], best.cost};
}

double exponential_vertical(double d_v, double d_cor_m) noexcept {
  return std::exp(-(d_v / d_cor_m) * std::log(2.0));
}

double fit_exponential_vertical(std::span<const std::pair<double, double>> points) {
  if (points.empty()) throw Error(ErrorCode::InsufficientData, "no vertical correlation points");
  const auto sse = [&](double log_d) {
    const double d_cor = std::exp(log_d);
    double s = 0.0;
    for (const auto& [dv, r] : points) {
      const double e = exponential_vertical(dv, d_cor) - r;
      s += e * e;
    }
    return s;
  };
  // Coarse scan over d_cor in [1e-2, 1e5] m, then Brent inside the best bracket.
  constexpr int kGrid = 400;
  const double lo = std::log(1e-2);
  const double hi = std::log(1e5);
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kGrid; ++i) {
    const double v = sse(lo + (hi - lo) * i / kGrid);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  if (best == 0 || best == kGrid) {
    throw Error(ErrorCode::FitDiverged, "vertical correlation distance runs to the search boundary");
  }
  const double a = lo + (hi - lo) * (best - 1) / kGrid;
  const double b = lo + (hi - lo) * (best + 1) / kGrid;
  const auto [x, fx] = boost::math::tools::brent_find_minima(sse, a, b, std::numeric_limits<double>::digits / 2);
  (void)fx;
  return std::exp(x);
}

void validate(const CorrelationModel3D& m) {
  if (!(m.a >= 0.0 && m.a <= 1.0)) throw Error(ErrorCode::InvalidConfig, "correlation model: a outside [0, 1]");
  if (!(m.b1 > 0.0) || !(m.b2 > 0.0)) throw Error(ErrorCode::InvalidConfig, "correlation model: rates must be > 0");
  if (!(m.d_cor_m > 0.0)) throw Error(ErrorCode::InvalidConfig, "correlation model: d_cor must be > 0");
  if (!(m.sigma_w2 > 0.0) || !std::isfinite(m.sigma_w2)) {
    throw Error(ErrorCode::InvalidConfig, "correlation model: sigma_w^2 must be > 0");
  }
}

double eval_correlation_3d(const CorrelationModel3D& m, double d_v, double d_h) noexcept {
  return exponential_vertical(d_v, m.d_cor_m) * biexponential(m.a, m.b1, m.b2, d_h);
}

CorrelationEstimate estimate_correlation_model(std::span<const FlightShadowing> flights,
                                               const CorrelationEstimateOptions& options) {
  if (flights.empty()) throw Error(ErrorCode::InsufficientData, "no flights to estimate correlation from");
  CorrelationEstimate est;
  est.horizontal = horizontal_correlation(flights, options.bin_m);
  est.horizontal_fit = fit_biexponential(est.horizontal, options.random_starts);
  est.horizontal_fixed_a = fit_biexponential_fixed_a(est.horizontal, options.fixed_a);

  double d_cor = options.fallback_d_cor_m;
  if (flights.size() >= 2) {
    est.vertical = vertical_correlation(flights, options.dh_max_m);
    est.vertical_points = average_by_vertical_distance(est.vertical);
    d_cor = fit_exponential_vertical(est.vertical_points);
    est.vertical_fitted = true;
    est.curves_3d = correlation_3d(flights, options.bin_m);
    for (const auto& [dv, curve] : est.curves_3d) {
      if (dv > 0.0 && curve.size() >= 5) est.fits_3d.emplace(dv, fit_biexponential_fixed_a(curve, options.fixed_a));
    }
  }

  double variance = 0.0;
  for (const auto& f : flights) variance += f.stats.std_db * f.stats.std_db;
  est.model.a = est.horizontal_fixed_a.a;
  est.model.b1 = est.horizontal_fixed_a.b1;
  est.model.b2 = est.horizontal_fixed_a.b2;
  est.model.d_cor_m = d_cor;
  est.model.sigma_w2 = variance / static_cast<double>(flights.size());
  validate(est.model);
  return est;
}

}  // namespace a2gmap
