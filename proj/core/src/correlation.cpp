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
#include <limits>
#include <string>

#include "a2gmap/error.hpp"
#include "a2gmap/parallel.hpp"
#include "a2gmap/statistics.hpp"

namespace a2gmap {

namespace {

constexpr std::size_t kPairChunks = 64;

struct BinSums {
  std::vector<double> value;
  std::vector<double> distance;
  std::vector<std::uint64_t> count;

  void add(std::size_t k, double v, double d) {
    if (k >= count.size()) {
      value.resize(k + 1, 0.0);
      distance.resize(k + 1, 0.0);
      count.resize(k + 1, 0);
    }
    value[k] += v;
    distance[k] += d;
    ++count[k];
  }

  void merge(const BinSums& o) {
    for (std::size_t k = 0; k < o.count.size(); ++k) {
      if (o.count[k] == 0) continue;
      if (k >= count.size()) {
        value.resize(k + 1, 0.0);
        distance.resize(k + 1, 0.0);
        count.resize(k + 1, 0);
      }
      value[k] += o.value[k];
      distance[k] += o.distance[k];
      count[k] += o.count[k];
    }
  }
};

enum class PairStat { Correlation, SemiVariance };

struct Prepared {
  std::vector<UnitVector> points;
  std::vector<double> z;
};

void check_flight(const FlightShadowing& f) {
  if (f.locations.size() != f.w_db.size()) {
    throw Error(ErrorCode::InvalidConfig, "flight " + std::to_string(f.flight_id) + ": locations/w size mismatch");
  }
}

Prepared prepare(const FlightShadowing& f, PairStat stat) {
  check_flight(f);
  if (stat == PairStat::Correlation && !(f.stats.std_db > 0.0)) {
    throw Error(ErrorCode::DegenerateStd, "flight " + std::to_string(f.flight_id) + " has zero shadowing std");
  }
  Prepared p;
  p.points.reserve(f.locations.size());
  p.z.reserve(f.w_db.size());
  for (std::size_t i = 0; i < f.w_db.size(); ++i) {
    p.points.push_back(to_unit_vector(f.locations[i]));
    const double centered = f.w_db[i] - f.stats.mean_db;
    p.z.push_back(stat == PairStat::Correlation ? centered / f.stats.std_db : centered);
  }
  return p;
}

// Bins every pair (i, j) with i from `a` and j from `b`. With `same` set the
// two are one flight and only i < j is visited.
BinSums bin_pairs(const Prepared& a, const Prepared& b, bool same, double bin_m, PairStat stat) {
  const std::size_t n = a.z.size();
  const std::size_t chunks = std::max<std::size_t>(1, std::min(kPairChunks, n));
  std::vector<BinSums> partial(chunks);
  parallel_chunks(chunks, [&](std::size_t c) {
    const auto [begin, end] = chunk_range(n, chunks, c);
    BinSums& acc = partial[c];
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = same ? i + 1 : 0; j < b.z.size(); ++j) {
        const double d = horizontal_distance(a.points[i], b.points[j]);
        const auto k = static_cast<std::size_t>(d / bin_m);
        const double v = stat == PairStat::Correlation ? a.z[i] * b.z[j]
                                                       : 0.5 * (a.z[i] - b.z[j]) * (a.z[i] - b.z[j]);
        acc.add(k, v, d);
      }
    }
  });
  BinSums total;
  for (const auto& p : partial) total.merge(p);
  return total;
}

// Per-bin averages across several binned pair sets: unweighted mean of the
// bin values, summed counts, count-weighted mean distance.
CorrelationCurve average_curves(const std::vector<BinSums>& sets, double bin_m) {
  std::size_t nbins = 0;
  for (const auto& s : sets) nbins = std::max(nbins, s.count.size());
  CorrelationCurve curve;
  for (std::size_t k = 0; k < nbins; ++k) {
    double value_sum = 0.0;
    double dist_sum = 0.0;
    std::uint64_t count = 0;
    int contributing = 0;
    for (const auto& s : sets) {
      if (k >= s.count.size() || s.count[k] == 0) continue;
      value_sum += s.value[k] / static_cast<double>(s.count[k]);
      dist_sum += s.distance[k];
      count += s.count[k];
      ++contributing;
    }
    if (count == 0) continue;
    curve.bin_centers_m.push_back((static_cast<double>(k) + 0.5) * bin_m);
    curve.mean_distance_m.push_back(dist_sum / static_cast<double>(count));
    curve.values.push_back(value_sum / contributing);
    curve.counts.push_back(count);
  }
  return curve;
}

void check_bin(double bin_m) {
  if (!(bin_m > 0.0)) throw Error(ErrorCode::InvalidConfig, "bin width must be > 0");
}

}  // namespace

double pair_correlation(double w_i, double w_j, const Moments& stats_i, const Moments& stats_j) {
  if (!(stats_i.std_db > 0.0) || !(stats_j.std_db > 0.0)) {
    throw Error(ErrorCode::DegenerateStd, "pair correlation needs positive standard deviations");
  }
  return (w_i - stats_i.mean_db) * (w_j - stats_j.mean_db) / (stats_i.std_db * stats_j.std_db);
}

FlightShadowing make_flight_shadowing(int flight_id, double height_m, std::vector<GeoLocation> locations,
                                      std::vector<double> w_db) {
  FlightShadowing f;
  f.flight_id = flight_id;
  f.height_m = height_m;
  f.locations = std::move(locations);
  f.w_db = std::move(w_db);
  check_flight(f);
  const GaussianFit g = fit_gaussian(f.w_db);
  f.stats = {g.mean_db, g.std_db};
  return f;
}

CorrelationCurve horizontal_correlation(std::span<const FlightShadowing> flights, double bin_m) {
  check_bin(bin_m);
  if (flights.empty()) throw Error(ErrorCode::InsufficientData, "no flights for horizontal correlation");
  std::vector<BinSums> per_flight;
  per_flight.reserve(flights.size());
  for (const auto& f : flights) {
    const Prepared p = prepare(f, PairStat::Correlation);
    per_flight.push_back(bin_pairs(p, p, true, bin_m, PairStat::Correlation));
  }
  return average_curves(per_flight, bin_m);
}

CorrelationCurve cross_flight_correlation(const FlightShadowing& a, const FlightShadowing& b, double bin_m) {
  check_bin(bin_m);
  const Prepared pa = prepare(a, PairStat::Correlation);
  if (&a == &b || a.flight_id == b.flight_id) {
    return average_curves({bin_pairs(pa, pa, true, bin_m, PairStat::Correlation)}, bin_m);
  }
  const Prepared pb = prepare(b, PairStat::Correlation);
  return average_curves({bin_pairs(pa, pb, false, bin_m, PairStat::Correlation)}, bin_m);
}

double matched_correlation(const FlightShadowing& a, const FlightShadowing& b, double dh_max_m,
                           std::uint64_t* matched) {
  const Prepared pa = prepare(a, PairStat::Correlation);
  const Prepared pb = prepare(b, PairStat::Correlation);
  double sum = 0.0;
  std::uint64_t count = 0;
  for (std::size_t i = 0; i < pa.z.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < pb.z.size(); ++j) {
      const double d = horizontal_distance(pa.points[i], pb.points[j]);
      if (d < best) {
        best = d;
        best_j = j;
      }
    }
    if (best <= dh_max_m) {
      sum += pa.z[i] * pb.z[best_j];
      ++count;
    }
  }
  if (matched) *matched = count;
  if (count < 10) {
    throw Error(ErrorCode::NoOverlap, "flights " + std::to_string(a.flight_id) + " and " +
                                          std::to_string(b.flight_id) + " share only " + std::to_string(count) +
                                          " position-matched samples");
  }
  return sum / static_cast<double>(count);
}

VerticalCorrelation vertical_correlation(std::span<const FlightShadowing> flights, double dh_max_m) {
  const std::size_t n = flights.size();
  VerticalCorrelation vc;
  vc.values.assign(n * n, 0.0);
  vc.matched_pairs.assign(n * n, 0);
  for (const auto& f : flights) vc.heights_m.push_back(f.height_m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      std::uint64_t matched = 0;
      const double r = matched_correlation(flights[i], flights[j], dh_max_m, &matched);
      vc.values[i * n + j] = vc.values[j * n + i] = r;
      vc.matched_pairs[i * n + j] = vc.matched_pairs[j * n + i] = matched;
    }
  }
  return vc;
}

std::vector<std::pair<double, double>> average_by_vertical_distance(const VerticalCorrelation& vc) {
  std::map<long long, std::pair<double, int>> groups;  // micrometre key -> (sum, count)
  const std::size_t n = vc.heights_m.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dv = std::abs(vc.heights_m[i] - vc.heights_m[j]);
      if (dv <= 0.0) continue;
      auto& g = groups[std::llround(dv * 1e6)];
      g.first += vc.at(i, j);
      ++g.second;
    }
  }
  std::vector<std::pair<double, double>> out;
  for (const auto& [key, g] : groups) out.emplace_back(static_cast<double>(key) * 1e-6, g.first / g.second);
  return out;
}

std::map<double, CorrelationCurve> correlation_3d(std::span<const FlightShadowing> flights, double bin_m) {
  check_bin(bin_m);
  std::vector<Prepared> prepared;
  prepared.reserve(flights.size());
  for (const auto& f : flights) prepared.push_back(prepare(f, PairStat::Correlation));

  std::map<long long, std::vector<BinSums>> groups;
  for (std::size_t i = 0; i < flights.size(); ++i) {
    for (std::size_t j = i + 1; j < flights.size(); ++j) {
      const double dv = std::abs(flights[i].height_m - flights[j].height_m);
      groups[std::llround(dv * 1e6)].push_back(
          bin_pairs(prepared[i], prepared[j], flights[i].flight_id == flights[j].flight_id, bin_m,
                    PairStat::Correlation));
    }
  }
  std::map<double, CorrelationCurve> out;
  for (const auto& [key, sets] : groups) out.emplace(static_cast<double>(key) * 1e-6, average_curves(sets, bin_m));
  return out;
}

CorrelationCurve empirical_semivariogram(std::span<const FlightShadowing> flights, double bin_m) {
  check_bin(bin_m);
  std::vector<BinSums> per_flight;
  for (const auto& f : flights) {
    const Prepared p = prepare(f, PairStat::SemiVariance);
    per_flight.push_back(bin_pairs(p, p, true, bin_m, PairStat::SemiVariance));
  }
  return average_curves(per_flight, bin_m);
}

}  // namespace a2gmap
