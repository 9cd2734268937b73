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

#include "a2gmap/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "a2gmap/kriging.hpp"
#include "a2gmap/synth.hpp"
#include "csv.hpp"

#ifndef A2GMAP_VERSION
#define A2GMAP_VERSION "0.0.0"
#endif

namespace a2gmap {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view tool_version() noexcept { return A2GMAP_VERSION; }

StageFailure::StageFailure(std::string stage, ErrorCode cause, const std::string& what)
    : Error(ErrorCode::StageFailure, "stage '" + stage + "': " + what), stage_(std::move(stage)), cause_(cause) {}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the tag
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t x = seed ^ h;
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

// Rounds to 12 significant digits so JSON reports carry the same precision
// as the CSV artifacts.
double r12(double v) {
  if (!std::isfinite(v)) return v;
  return std::stod(detail::fmt12(v));
}

json num(double v) { return std::isfinite(v) ? json(r12(v)) : json(nullptr); }

class ArtifactWriter {
 public:
  ArtifactWriter(fs::path staging, json stamp) : staging_(std::move(staging)), stamp_(std::move(stamp)) {}

  void text(const fs::path& rel, const std::string& content) {
    const fs::path p = staging_ / rel;
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << content;
    out.close();
    if (!out) throw Error(ErrorCode::Io, "cannot write " + p.string());
    artifacts_.push_back(rel);
  }

  void report(const fs::path& rel, json doc) {
    doc["stamp"] = stamp_;
    text(rel, doc.dump(2) + "\n");
  }

  const std::vector<fs::path>& artifacts() const noexcept { return artifacts_; }
  const fs::path& staging() const noexcept { return staging_; }

 private:
  fs::path staging_;
  json stamp_;
  std::vector<fs::path> artifacts_;
};

template <typename Fn>
auto in_stage(const std::string& name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageFailure&) {
    throw;
  } catch (const Error& e) {
    throw StageFailure(name, e.code(), e.what());
  } catch (const fs::filesystem_error& e) {
    throw StageFailure(name, ErrorCode::Io, e.what());
  } catch (const std::bad_alloc&) {
    throw StageFailure(name, ErrorCode::InsufficientData, "out of memory");
  }
}

MeasurementSet select_heights(const MeasurementSet& data, const HeightSelection& heights) {
  if (heights.empty()) return data;
  MeasurementSet out;
  out.calibrated = data.calibrated;
  for (const auto& s : data.samples) {
    const bool keep = std::any_of(heights.begin(), heights.end(),
                                  [&](double h) { return std::abs(h - s.height_label_m) < 1e-6; });
    if (keep) out.samples.push_back(s);
  }
  if (out.empty()) throw Error(ErrorCode::InsufficientData, "no flight matches the requested heights");
  return out;
}

struct ErrorStats {
  std::size_t n = 0;
  double mean = 0.0;
  double std_dev = 0.0;
  double rmse = 0.0;
};

ErrorStats error_stats(const std::vector<double>& e) {
  ErrorStats s;
  s.n = e.size();
  if (e.empty()) return s;
  double sum = 0.0;
  double sq = 0.0;
  for (double x : e) {
    sum += x;
    sq += x * x;
  }
  s.mean = sum / static_cast<double>(e.size());
  s.rmse = std::sqrt(sq / static_cast<double>(e.size()));
  double var = 0.0;
  for (double x : e) var += (x - s.mean) * (x - s.mean);
  s.std_dev = std::sqrt(var / static_cast<double>(e.size()));
  return s;
}

json error_json(const ErrorStats& s) {
  return {{"samples", s.n}, {"mean_error_db", num(s.mean)}, {"std_error_db", num(s.std_dev)}, {"rmse_db", num(s.rmse)}};
}

std::string curve_csv(const CorrelationCurve& c) {
  std::string out = "distance_m,correlation,count\n";
  for (std::size_t k = 0; k < c.size(); ++k) {
    out += detail::fmt12(c.bin_centers_m[k]) + "," + detail::fmt12(c.values[k]) + "," + std::to_string(c.counts[k]) +
           "\n";
  }
  return out;
}

json fit_json(const BiExponentialFit& f) {
  return {{"a", num(f.a)}, {"b1", num(f.b1)}, {"b2", num(f.b2)}, {"cost", num(f.cost)}};
}

json model_json(const CorrelationModel3D& m) {
  return {{"a", num(m.a)}, {"b1", num(m.b1)}, {"b2", num(m.b2)}, {"d_cor", num(m.d_cor_m)}, {"sigma_w2", num(m.sigma_w2)}};
}

std::string dv_tag(double dv) {
  std::string s = detail::fmt12(dv);
  std::replace(s.begin(), s.end(), '.', 'p');
  return s;
}

// Everything the stages share. Later stages pull what they need through the
// lazy accessors, so prerequisites are computed even when not written.
class Run {
 public:
  Run(const PipelineConfig& cfg, ArtifactWriter& out) : cfg_(cfg), out_(out) {}

  void load() {
    in_stage("antenna-load", [&] {
      prop_ = make_propagation_config(cfg_);
      bs_ = base_station(cfg_);
    });
    in_stage("data-load", [&] {
      if (cfg_.flights.empty()) {
        synthesize();
        return;
      }
      for (const auto& f : cfg_.flights) {
        const fs::path p = fs::path(f.path).is_absolute() ? fs::path(f.path) : cfg_.base_dir / f.path;
        append(data_, load_measurements(p, cfg_.calibration, {f.flight_id, f.height_m}));
      }
    });
  }

  void stage_synth() {
    in_stage("synth", [&] {
      if (!synthetic_) synthesize();
      const MeasurementSet& set = synthetic_->data;
      for (int id : set.flight_ids()) {
        out_.text(fs::path("synth") / ("flight_" + std::to_string(id) + ".csv"),
                  format_measurements(set.flight(id), true, cfg_.calibration.power_offset_db));
      }
      json flights = json::array();
      for (int id : set.flight_ids()) {
        const MeasurementSet f = set.flight(id);
        flights.push_back({{"flight_id", id},
                           {"height_m", num(f[0].height_label_m)},
                           {"samples", f.size()},
                           {"file", "synth/flight_" + std::to_string(id) + ".csv"}});
      }
      out_.report("synth_report.json", {{"seed", synthetic_->seed},
                                        {"field_model", model_json(cfg_.correlation)},
                                        {"jitter", num(synthetic_->jitter)},
                                        {"power_offset_db", num(cfg_.calibration.power_offset_db)},
                                        {"flights", flights}});
    });
  }

  void stage_fit() {
    in_stage("fit", [&] {
      struct Setup {
        std::string name;
        PropagationConfig cfg;
      };
      std::vector<Setup> setups{{"configured", prop_}};
      PropagationConfig dip = prop_;
      dip.bs_pattern = dip.uav_pattern = AntennaPattern::dipole();
      setups.push_back({"dipole", dip});
      PropagationConfig iso = prop_;
      iso.bs_pattern = iso.uav_pattern = AntennaPattern::isotropic(1.0);
      setups.push_back({"isotropic", iso});

      json results = json::array();
      for (const auto& setup : setups) {
        for (PathLossModel model : {PathLossModel::TwoRay, PathLossModel::FreeSpace}) {
          const ShadowingExtraction ex = extract_shadowing(setup.cfg, bs_, data_, model);
          json per_flight = json::array();
          std::vector<double> all;
          for (int id : data_.flight_ids()) {
            std::vector<double> e;
            double height = 0.0;
            for (std::size_t i = 0; i < data_.size(); ++i) {
              if (data_[i].flight_id != id || ex.flagged[i]) continue;
              e.push_back(ex.w_db[i]);
              height = data_[i].height_label_m;
            }
            all.insert(all.end(), e.begin(), e.end());
            json row = error_json(error_stats(e));
            row["flight_id"] = id;
            row["height_m"] = num(height);
            per_flight.push_back(row);
          }
          results.push_back({{"antenna", setup.name},
                             {"model", model == PathLossModel::TwoRay ? "two_ray" : "free_space"},
                             {"flagged", ex.flagged_count},
                             {"overall", error_json(error_stats(all))},
                             {"flights", per_flight}});
        }
      }

      std::string csv = "flight_id,t_s,d_h_m,d_3d_m,measured_dbm,two_ray_dbm,free_space_dbm\n";
      for (const auto& s : data_.samples) {
        csv += std::to_string(s.flight_id) + "," + detail::fmt12(s.t_s) + ",";
        try {
          const LinkGeometry g = link_geometry(bs_, s.loc);
          csv += detail::fmt12(g.d_h) + "," + detail::fmt12(g.d_3d) + "," + detail::fmt12(s.rsrp_dbm) + "," +
                 detail::fmt12(predict_rsrp(prop_, bs_, s.loc, PathLossModel::TwoRay)) + "," +
                 detail::fmt12(predict_rsrp(prop_, bs_, s.loc, PathLossModel::FreeSpace)) + "\n";
        } catch (const Error&) {
          csv += "nan,nan," + detail::fmt12(s.rsrp_dbm) + ",nan,nan\n";
        }
      }
      out_.text("pathloss.csv", csv);
      out_.report("pathloss_fit.json", {{"residual", "measured_dbm - predicted_dbm"}, {"results", results}});
    });
  }

  void stage_shadowing() {
    in_stage("shadowing", [&] {
      const auto& flights = shadowing();
      std::string csv = "flight_id,t_s,lat_deg,lon_deg,alt_m,w_db,flagged\n";
      for (std::size_t i = 0; i < data_.size(); ++i) {
        const Sample& s = data_[i];
        csv += std::to_string(s.flight_id) + "," + detail::fmt12(s.t_s) + "," + detail::fmt12(s.loc.lat_deg) + "," +
               detail::fmt12(s.loc.lon_deg) + "," + detail::fmt12(s.loc.alt_m) + "," +
               (extraction_->flagged[i] ? std::string("nan") : detail::fmt12(extraction_->w_db[i])) + "," +
               (extraction_->flagged[i] ? "1" : "0") + "\n";
      }
      out_.text("shadowing.csv", csv);

      json rows = json::array();
      for (std::size_t k = 0; k < flights.size(); ++k) {
        const ShadowingStats& st = skew_fits_[k];
        rows.push_back({{"flight_id", flights[k].flight_id},
                        {"height_m", num(flights[k].height_m)},
                        {"samples", st.samples},
                        {"mean_db", num(st.mean_db)},
                        {"std_db", num(st.std_db)},
                        {"alpha", num(st.alpha)},
                        {"xi", num(st.xi)},
                        {"omega", num(st.omega)},
                        {"nmse_gaussian", num(st.nmse_gaussian)},
                        {"nmse_skewed", num(st.nmse_skewed)},
                        {"baseline_rmse_db", num(baseline_rmse(st))}});
      }
      out_.report("shadowing_stats.json", {{"histogram_bins", cfg_.histogram_bins},
                                           {"flagged_samples", extraction_->flagged_count},
                                           {"flights", rows}});
    });
  }

  void stage_correlate() {
    in_stage("correlate", [&] {
      const CorrelationEstimate& est = estimate();
      out_.text("horizontal_correlation.csv", curve_csv(est.horizontal));
      std::string vcsv = "height_i_m,height_j_m,correlation,matched_pairs\n";
      const std::size_t n = est.vertical.heights_m.size();
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          vcsv += detail::fmt12(est.vertical.heights_m[i]) + "," + detail::fmt12(est.vertical.heights_m[j]) + "," +
                  detail::fmt12(est.vertical.at(i, j)) + "," +
                  std::to_string(est.vertical.matched_pairs[i * n + j]) + "\n";
        }
      }
      out_.text("vertical_correlation.csv", vcsv);
      json fits3d = json::object();
      for (const auto& [dv, curve] : est.curves_3d) {
        out_.text("correlation_3d_dv" + dv_tag(dv) + "m.csv", curve_csv(curve));
        const auto f = est.fits_3d.find(dv);
        if (f != est.fits_3d.end()) fits3d[detail::fmt12(dv)] = fit_json(f->second);
      }
      json vpoints = json::array();
      for (const auto& [dv, r] : est.vertical_points) vpoints.push_back({num(dv), num(r)});
      json doc = model_json(est.model);
      doc["fits"] = {{"horizontal_free_a", fit_json(est.horizontal_fit)},
                     {"horizontal_fixed_a", fit_json(est.horizontal_fixed_a)},
                     {"vertical_points", vpoints},
                     {"vertical_fitted", est.vertical_fitted},
                     {"by_vertical_distance", fits3d}};
      out_.report("correlation_model.json", doc);
    });
  }

  void stage_variogram() {
    in_stage("variogram", [&] {
      const Variogram v = variogram();
      const CorrelationCurve emp = empirical_semivariogram(shadowing(), cfg_.bin_m);
      std::string csv = "distance_m,semivariance,count,model_semivariance\n";
      for (std::size_t k = 0; k < emp.size(); ++k) {
        csv += detail::fmt12(emp.bin_centers_m[k]) + "," + detail::fmt12(emp.values[k]) + "," +
               std::to_string(emp.counts[k]) + "," + detail::fmt12(semivariogram(v, 0.0, emp.bin_centers_m[k])) + "\n";
      }
      out_.text("semivariogram.csv", csv);
      out_.report("variogram.json", {{"model", model_json(v.model)},
                                     {"nugget", num(v.nugget)},
                                     {"sill", num(v.sill())},
                                     {"model_source", model_source()}});
    });
  }

  void stage_krige() {
    in_stage("krige", [&] {
      const KrigingOptions opt = kriging_options();
      const MeasurementSet pool = select_heights(data_, cfg_.krige.pool_heights);
      const MeasurementSet targets = select_heights(
          data_, cfg_.krige.target_heights.empty() ? cfg_.krige.pool_heights : cfg_.krige.target_heights);
      const std::vector<Prediction> pred = predict_targets(opt, pool, targets);
      std::string csv = "flight_id,t_s,lat_deg,lon_deg,alt_m,measured_dbm,predicted_dbm,neighbor_count,fallback_flag\n";
      std::vector<double> p;
      std::vector<double> m;
      std::size_t fallbacks = 0;
      for (std::size_t i = 0; i < targets.size(); ++i) {
        const Sample& s = targets[i];
        csv += std::to_string(s.flight_id) + "," + detail::fmt12(s.t_s) + "," + detail::fmt12(s.loc.lat_deg) + "," +
               detail::fmt12(s.loc.lon_deg) + "," + detail::fmt12(s.loc.alt_m) + "," + detail::fmt12(s.rsrp_dbm) +
               "," + detail::fmt12(pred[i].predicted_dbm) + "," + std::to_string(pred[i].neighbor_count) + "," +
               (pred[i].fallback ? "1" : "0") + "\n";
        p.push_back(pred[i].predicted_dbm);
        m.push_back(s.rsrp_dbm);
        fallbacks += pred[i].fallback ? 1 : 0;
      }
      out_.text("krige_predictions.csv", csv);
      out_.report("krige_report.json", {{"rmse_db", num(rmse(p, m))},
                                        {"targets", targets.size()},
                                        {"pool", pool.size()},
                                        {"fallback_predictions", fallbacks},
                                        {"r0", num(opt.r0_m)},
                                        {"m_max", opt.m_max},
                                        {"mode", opt.mode == KrigingMode::Rsrp ? "rsrp" : "residual"},
                                        {"model_source", model_source()}});
    });
  }

  void stage_xval() {
    in_stage("xval", [&] {
      const KrigingOptions opt = kriging_options();
      const MeasurementSet pool = select_heights(data_, cfg_.xval.pool_heights);
      const MeasurementSet targets = select_heights(
          data_, cfg_.xval.target_heights.empty() ? cfg_.xval.pool_heights : cfg_.xval.target_heights);
      const std::uint64_t seed = derive_seed(cfg_.seed, "xval");
      const RmseSummary s = cross_validate(opt, pool, targets, cfg_.xval.m, cfg_.xval.n0, cfg_.xval.iterations, seed);
      std::string csv = "iteration,rmse_db\n";
      for (std::size_t i = 0; i < s.rmse.size(); ++i) csv += std::to_string(i) + "," + detail::fmt12(s.rmse[i]) + "\n";
      out_.text("xval_rmse.csv", csv);
      double baseline = 0.0;
      for (const auto& f : shadowing()) baseline += f.stats.std_db * f.stats.std_db;
      baseline = std::sqrt(baseline / static_cast<double>(shadowing().size()));
      out_.report("xval_summary.json", {{"median", num(s.median)},
                                        {"q25", num(s.q25)},
                                        {"q75", num(s.q75)},
                                        {"iterations", s.iterations},
                                        {"M", s.m},
                                        {"N0", s.n0},
                                        {"r0", num(s.r0_m)},
                                        {"fallback_predictions", s.fallback_predictions},
                                        {"baseline_rmse_db", num(baseline)},
                                        {"seed", seed},
                                        {"model_source", model_source()}});
    });
  }

  void stage_map() {
    in_stage("map", [&] {
      const KrigingOptions opt = kriging_options();
      const MeasurementSet pool = select_heights(data_, cfg_.map.pool_heights);
      const MapGrid grid = map_grid(pool);
      const std::vector<MapCell> cells = generate_radio_map(opt, pool, grid);
      std::string csv = "lat_deg,lon_deg,alt_m,predicted_dbm,neighbor_count,fallback_flag\n";
      std::size_t fallbacks = 0;
      for (const auto& c : cells) {
        csv += detail::fmt12(c.loc.lat_deg) + "," + detail::fmt12(c.loc.lon_deg) + "," + detail::fmt12(c.loc.alt_m) +
               "," + detail::fmt12(c.predicted_dbm) + "," + std::to_string(c.neighbor_count) + "," +
               (c.fallback ? "1" : "0") + "\n";
        fallbacks += c.fallback ? 1 : 0;
      }
      out_.text("radio_map.csv", csv);
      out_.report("radio_map.json", {{"cells", cells.size()},
                                     {"fallback_cells", fallbacks},
                                     {"pool", pool.size()},
                                     {"step_m", num(cfg_.map.step_m)},
                                     {"r0", num(opt.r0_m)},
                                     {"model_source", model_source()}});
    });
  }

 private:
  struct Synthetic {
    MeasurementSet data;
    std::uint64_t seed = 0;
    double jitter = 0.0;
  };

  void synthesize() {
    SyntheticScenario sc;
    sc.cfg = prop_;
    sc.bs = bs_;
    sc.model = cfg_.model;
    sc.field = cfg_.correlation;
    sc.trajectory = make_trajectory(cfg_);
    sc.seed = derive_seed(cfg_.seed, "synth");
    sc.height_mean_db = cfg_.synth.height_mean_db;
    sc.sample_period_s = cfg_.synth.sample_period_s;
    const std::vector<Track> tracks = generate_trajectory(sc.trajectory);
    std::vector<GeoLocation> all;
    for (const auto& t : tracks) all.insert(all.end(), t.locations.begin(), t.locations.end());
    const ShadowingFieldSampler sampler(all, sc.field);
    Synthetic s;
    s.data = synthesize_rsrp(sc, tracks, sampler);
    s.seed = sc.seed;
    s.jitter = sampler.jitter();
    if (cfg_.flights.empty()) data_ = s.data;
    synthetic_ = std::move(s);
  }

  const std::vector<FlightShadowing>& shadowing() {
    if (shadowing_) return *shadowing_;
    extraction_ = extract_shadowing(prop_, bs_, data_, cfg_.model);
    std::vector<FlightShadowing> flights;
    for (int id : data_.flight_ids()) {
      std::vector<GeoLocation> locs;
      std::vector<double> w;
      double height = 0.0;
      for (std::size_t i = 0; i < data_.size(); ++i) {
        if (data_[i].flight_id != id || extraction_->flagged[i]) continue;
        locs.push_back(data_[i].loc);
        w.push_back(extraction_->w_db[i]);
        height = data_[i].height_label_m;
      }
      if (w.empty()) continue;
      skew_fits_.push_back(fit_skew_normal(w, static_cast<std::size_t>(cfg_.histogram_bins)));
      flights.push_back(make_flight_shadowing(id, height, std::move(locs), std::move(w)));
    }
    if (flights.empty()) throw Error(ErrorCode::InsufficientData, "no usable shadowing samples");
    shadowing_ = std::move(flights);
    return *shadowing_;
  }

  const CorrelationEstimate& estimate() {
    if (!estimate_) {
      CorrelationEstimateOptions o;
      o.bin_m = cfg_.bin_m;
      o.dh_max_m = cfg_.dh_max_m;
      o.fixed_a = cfg_.fixed_a;
      o.random_starts = cfg_.random_starts;
      o.fallback_d_cor_m = cfg_.correlation.d_cor_m;
      estimate_ = estimate_correlation_model(shadowing(), o);
    }
    return *estimate_;
  }

  std::string model_source() const { return cfg_.use_fitted_model ? "fitted" : "config"; }

  Variogram variogram() {
    Variogram v;
    v.model = cfg_.use_fitted_model ? estimate().model : cfg_.correlation;
    v.nugget = cfg_.nugget;
    return v;
  }

  KrigingOptions kriging_options() {
    KrigingOptions opt;
    opt.variogram = variogram();
    opt.r0_m = cfg_.r0_m;
    opt.m_max = cfg_.m_max;
    opt.mode = cfg_.mode;
    opt.trend = PathLossTrend{prop_, bs_, cfg_.model};
    return opt;
  }

  MapGrid map_grid(const MeasurementSet& pool) const {
    double lat_lo = 90.0, lat_hi = -90.0, lon_lo = 180.0, lon_hi = -180.0;
    std::set<double> heights;
    for (const auto& s : pool.samples) {
      lat_lo = std::min(lat_lo, s.loc.lat_deg);
      lat_hi = std::max(lat_hi, s.loc.lat_deg);
      lon_lo = std::min(lon_lo, s.loc.lon_deg);
      lon_hi = std::max(lon_hi, s.loc.lon_deg);
      heights.insert(s.height_label_m);
    }
    const double lat_c = deg2rad(0.5 * (lat_lo + lat_hi));
    const double dlat = rad2deg(1.0 / kEarthRadiusM);
    const double dlon = rad2deg(1.0 / (kEarthRadiusM * std::cos(lat_c)));
    lat_lo -= cfg_.map.margin_m * dlat;
    lat_hi += cfg_.map.margin_m * dlat;
    lon_lo -= cfg_.map.margin_m * dlon;
    lon_hi += cfg_.map.margin_m * dlon;
    const double lat_step = cfg_.map.step_m * dlat;
    const double lon_step = cfg_.map.step_m * dlon;
    const auto n_lat = static_cast<std::size_t>(std::floor((lat_hi - lat_lo) / lat_step)) + 1;
    const auto n_lon = static_cast<std::size_t>(std::floor((lon_hi - lon_lo) / lon_step)) + 1;
    std::vector<double> alts = cfg_.map.altitudes_m;
    if (alts.empty()) alts.assign(heights.begin(), heights.end());
    MapGrid grid;
    for (double alt : alts) {
      for (std::size_t i = 0; i < n_lat; ++i) {
        for (std::size_t j = 0; j < n_lon; ++j) {
          grid.nodes.push_back({lat_lo + static_cast<double>(i) * lat_step, lon_lo + static_cast<double>(j) * lon_step,
                                alt});
        }
      }
    }
    return grid;
  }

  const PipelineConfig& cfg_;
  ArtifactWriter& out_;
  PropagationConfig prop_;
  GeoLocation bs_;
  MeasurementSet data_;
  std::optional<Synthetic> synthetic_;
  std::optional<ShadowingExtraction> extraction_;
  std::optional<std::vector<FlightShadowing>> shadowing_;
  std::vector<ShadowingStats> skew_fits_;
  std::optional<CorrelationEstimate> estimate_;
};

std::vector<std::string> ordered_stages(const std::vector<std::string>& requested) {
  std::vector<std::string> out;
  for (auto name : kStageNames) {
    if (requested.empty() || std::find(requested.begin(), requested.end(), name) != requested.end()) {
      out.emplace_back(name);
    }
  }
  return out;
}

fs::path staging_path(const fs::path& out_dir) {
  fs::path norm = out_dir.lexically_normal();
  if (norm.filename().empty()) norm = norm.parent_path();
  return norm.parent_path() / ("." + norm.filename().string() + ".staging");
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& cfg, const fs::path& out_dir) {
  PipelineResult result;
  result.config_hash = config_hash(cfg);
  result.stages = ordered_stages(cfg.stages);

  json inputs = json::object();
  in_stage("data-load", [&] {
    for (const auto& f : cfg.flights) {
      const fs::path p = fs::path(f.path).is_absolute() ? fs::path(f.path) : cfg.base_dir / f.path;
      inputs[f.path] = sha256_file(p);
    }
    for (const AntennaSpec* a : {&cfg.bs_antenna, &cfg.uav_antenna}) {
      if (a->kind != AntennaKind::Measured) continue;
      const fs::path p = fs::path(a->path).is_absolute() ? fs::path(a->path) : cfg.base_dir / a->path;
      if (!fs::exists(p)) throw StageFailure("antenna-load", ErrorCode::Io, "cannot open " + p.string());
      inputs[a->path] = sha256_file(p);
    }
  });
  const json stamp = {{"tool_version", tool_version()},
                      {"config_hash", result.config_hash},
                      {"seed", cfg.seed},
                      {"dataset", cfg.flights.empty() ? "synthetic" : "measured"},
                      {"input_digests", inputs}};

  const fs::path staging = staging_path(out_dir);
  std::error_code ec;
  fs::remove_all(staging, ec);
  fs::create_directories(staging);
  ArtifactWriter writer(staging, stamp);
  try {
    Run run(cfg, writer);
    run.load();
    const std::map<std::string, std::function<void()>> stages = {
        {"synth", [&] { run.stage_synth(); }},         {"fit", [&] { run.stage_fit(); }},
        {"shadowing", [&] { run.stage_shadowing(); }}, {"correlate", [&] { run.stage_correlate(); }},
        {"variogram", [&] { run.stage_variogram(); }}, {"krige", [&] { run.stage_krige(); }},
        {"xval", [&] { run.stage_xval(); }},           {"map", [&] { run.stage_map(); }},
    };
    for (const auto& name : result.stages) stages.at(name)();

    json listing = json::array();
    for (const auto& rel : writer.artifacts()) {
      listing.push_back({{"path", rel.generic_string()}, {"sha256", sha256_file(staging / rel)}});
    }
    writer.report("manifest.json", {{"stages", result.stages}, {"artifacts", listing}});

    in_stage("publish", [&] {
      for (const auto& rel : writer.artifacts()) {
        const fs::path dst = out_dir / rel;
        fs::create_directories(dst.parent_path());
        fs::rename(staging / rel, dst);
      }
    });
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
  fs::remove_all(staging, ec);
  result.artifacts = writer.artifacts();
  return result;
}

}  // namespace a2gmap
