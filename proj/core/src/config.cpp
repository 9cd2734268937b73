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

#include "a2gmap/config.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "a2gmap/error.hpp"
#include "csv.hpp"

namespace a2gmap {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::InvalidConfig, where + ": " + what);
}

// Walks one JSON object, remembering which keys were read so leftovers
// (usually typos) can be reported.
class Section {
 public:
  Section(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) bad(where_, "expected an object");
  }

  ~Section() = default;
  Section(const Section&) = delete;
  Section& operator=(const Section&) = delete;

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string path(const std::string& key) const { return where_.empty() ? key : where_ + "." + key; }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) bad(path(key), "expected a number");
      out = v->get<double>();
    }
  }

  template <typename Int>
  void integer(const std::string& key, Int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) bad(path(key), "expected an integer");
      if (v->is_number_unsigned()) {
        out = static_cast<Int>(v->get<std::uint64_t>());
      } else {
        const auto x = v->get<std::int64_t>();
        if (x < 0 && std::is_unsigned_v<Int>) bad(path(key), "must be non-negative");
        out = static_cast<Int>(x);
      }
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) bad(path(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) bad(path(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  void numbers(const std::string& key, std::vector<double>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) bad(path(key), "expected an array of numbers");
      out.clear();
      for (const auto& x : *v) {
        if (!x.is_number()) bad(path(key), "expected an array of numbers");
        out.push_back(x.get<double>());
      }
    }
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) bad(path(key), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

template <typename Fn>
void nested(Section& parent, const std::string& key, Fn&& fn) {
  if (const json* v = parent.find(key)) {
    Section s(*v, parent.path(key));
    fn(s);
    s.finish();
  }
}

AntennaKind antenna_kind(const std::string& s, const std::string& where) {
  if (s == "isotropic") return AntennaKind::Isotropic;
  if (s == "dipole") return AntennaKind::Dipole;
  if (s == "measured") return AntennaKind::Measured;
  bad(where, "antenna kind must be isotropic, dipole or measured");
}

std::string_view to_string(AntennaKind k) {
  switch (k) {
    case AntennaKind::Isotropic: return "isotropic";
    case AntennaKind::Dipole: return "dipole";
    case AntennaKind::Measured: return "measured";
  }
  return "dipole";
}

void read_antenna(Section& parent, const std::string& key, AntennaSpec& out) {
  nested(parent, key, [&](Section& s) {
    std::string kind(to_string(out.kind));
    s.string("kind", kind);
    out.kind = antenna_kind(kind, s.path("kind"));
    s.number("gain_dbi", out.gain_dbi);
    s.string("path", out.path);
  });
  if (out.kind == AntennaKind::Measured && out.path.empty()) bad(parent.path(key), "measured antenna needs a path");
}

json antenna_json(const AntennaSpec& a) {
  return {{"kind", to_string(a.kind)}, {"gain_dbi", a.gain_dbi}, {"path", a.path}};
}

void check_stage(const std::string& name) {
  for (auto s : kStageNames) {
    if (s == name) return;
  }
  bad("stages", "unknown stage '" + name + "'");
}

void check(const PipelineConfig& c) {
  if (!(c.bin_m > 0.0)) bad("statistics.bin_m", "must be > 0");
  if (!(c.dh_max_m > 0.0)) bad("statistics.dh_max_m", "must be > 0");
  if (c.histogram_bins < 2) bad("statistics.histogram_bins", "must be >= 2");
  if (c.random_starts < 0) bad("statistics.random_starts", "must be >= 0");
  if (!(c.fixed_a >= 0.0 && c.fixed_a <= 1.0)) bad("statistics.fixed_a", "must lie in [0, 1]");
  if (!(c.r0_m > 0.0)) bad("kriging.r0_m", "must be > 0");
  if (c.m_max < 1) bad("kriging.m_max", "must be >= 1");
  if (!(c.nugget >= 0.0)) bad("kriging.nugget", "must be >= 0");
  if (c.xval.iterations < 1) bad("xval.iterations", "must be >= 1");
  if (c.xval.m < 1 || c.xval.n0 < 1) bad("xval", "M and N0 must be >= 1");
  if (!(c.map.step_m > 0.0)) bad("map.step_m", "must be > 0");
  if (!(c.map.margin_m >= 0.0)) bad("map.margin_m", "must be >= 0");
  if (!std::isfinite(c.calibration.power_offset_db)) bad("calibration.power_offset_db", "must be finite");
  std::set<int> ids;
  for (const auto& f : c.flights) {
    if (f.path.empty()) bad("flights", "every flight needs a path");
    if (!ids.insert(f.flight_id).second) bad("flights", "duplicate flight_id " + std::to_string(f.flight_id));
  }
  for (const auto& s : c.stages) check_stage(s);
  try {
    validate(c.correlation);
  } catch (const Error& e) {
    bad("correlation_model", e.what());
  }
}

}  // namespace

PipelineConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config is not valid JSON: ") + e.what());
  }
  PipelineConfig c;
  Section root(doc, "");

  if (const json* v = root.find("seed")) {
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0)) {
      bad("seed", "expected a non-negative integer");
    }
    c.seed = v->get<std::uint64_t>();
  }
  if (const json* v = root.find("stages")) {
    if (!v->is_array()) bad("stages", "expected an array of stage names");
    for (const auto& s : *v) {
      if (!s.is_string()) bad("stages", "expected an array of stage names");
      c.stages.push_back(s.get<std::string>());
    }
  }
  if (const json* v = root.find("flights")) {
    if (!v->is_array()) bad("flights", "expected an array");
    int next_id = 1;
    for (const auto& item : *v) {
      Section s(item, "flights[]");
      FlightInput f;
      f.flight_id = next_id;
      s.string("path", f.path);
      s.integer("flight_id", f.flight_id);
      s.number("height_m", f.height_m);
      s.finish();
      next_id = f.flight_id + 1;
      c.flights.push_back(f);
    }
  }
  nested(root, "calibration", [&](Section& s) {
    s.number("power_offset_db", c.calibration.power_offset_db);
    std::string drift = c.calibration.altitude_drift == AltitudeDrift::Linear ? "linear" : "none";
    s.string("altitude_drift", drift);
    if (drift == "linear") {
      c.calibration.altitude_drift = AltitudeDrift::Linear;
    } else if (drift == "none") {
      c.calibration.altitude_drift = AltitudeDrift::None;
    } else {
      bad(s.path("altitude_drift"), "must be linear or none");
    }
    s.boolean("trim_takeoff_landing", c.calibration.trim_takeoff_landing);
    s.number("trim_tolerance_m", c.calibration.trim_tolerance_m);
  });
  nested(root, "propagation", [&](Section& s) {
    s.number("bs_lat_deg", c.bs_lat_deg);
    s.number("bs_lon_deg", c.bs_lon_deg);
    s.number("carrier_hz", c.carrier_hz);
    s.number("tx_power_dbm", c.tx_power_dbm);
    s.number("epsilon0", c.epsilon0);
    s.number("bs_height_m", c.bs_height_m);
    read_antenna(s, "bs_antenna", c.bs_antenna);
    read_antenna(s, "uav_antenna", c.uav_antenna);
    std::string model = c.model == PathLossModel::TwoRay ? "two_ray" : "free_space";
    s.string("model", model);
    if (model == "two_ray") {
      c.model = PathLossModel::TwoRay;
    } else if (model == "free_space") {
      c.model = PathLossModel::FreeSpace;
    } else {
      bad(s.path("model"), "must be two_ray or free_space");
    }
    s.boolean("ground_reflection", c.ground_reflection);
  });
  nested(root, "statistics", [&](Section& s) {
    s.integer("histogram_bins", c.histogram_bins);
    s.number("bin_m", c.bin_m);
    s.number("dh_max_m", c.dh_max_m);
    s.integer("random_starts", c.random_starts);
    s.number("fixed_a", c.fixed_a);
    s.boolean("use_fitted_model", c.use_fitted_model);
  });
  nested(root, "correlation_model", [&](Section& s) {
    s.number("a", c.correlation.a);
    s.number("b1", c.correlation.b1);
    s.number("b2", c.correlation.b2);
    s.number("d_cor", c.correlation.d_cor_m);
    s.number("sigma_w2", c.correlation.sigma_w2);
  });
  nested(root, "kriging", [&](Section& s) {
    s.number("r0_m", c.r0_m);
    s.integer("m_max", c.m_max);
    s.number("nugget", c.nugget);
    std::string mode = c.mode == KrigingMode::Rsrp ? "rsrp" : "residual";
    s.string("mode", mode);
    if (mode == "rsrp") {
      c.mode = KrigingMode::Rsrp;
    } else if (mode == "residual") {
      c.mode = KrigingMode::Residual;
    } else {
      bad(s.path("mode"), "must be rsrp or residual");
    }
    nested(s, "krige", [&](Section& k) {
      k.numbers("pool_heights", c.krige.pool_heights);
      k.numbers("target_heights", c.krige.target_heights);
    });
  });
  nested(root, "xval", [&](Section& s) {
    s.numbers("pool_heights", c.xval.pool_heights);
    s.numbers("target_heights", c.xval.target_heights);
    s.integer("M", c.xval.m);
    s.integer("N0", c.xval.n0);
    s.integer("iterations", c.xval.iterations);
  });
  nested(root, "map", [&](Section& s) {
    s.numbers("pool_heights", c.map.pool_heights);
    s.number("step_m", c.map.step_m);
    s.numbers("altitudes_m", c.map.altitudes_m);
    s.number("margin_m", c.map.margin_m);
  });
  nested(root, "synth", [&](Section& s) {
    s.number("origin_east_m", c.synth.origin_east_m);
    s.number("origin_north_m", c.synth.origin_north_m);
    nested(s, "zigzag", [&](Section& z) {
      z.number("width_m", c.synth.zigzag.width_m);
      z.number("length_m", c.synth.zigzag.length_m);
      z.number("leg_spacing_m", c.synth.zigzag.leg_spacing_m);
    });
    if (const json* v = s.find("waypoints")) {
      if (!v->is_array()) bad(s.path("waypoints"), "expected an array of [east_m, north_m]");
      for (const auto& p : *v) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
          bad(s.path("waypoints"), "expected an array of [east_m, north_m]");
        }
        c.synth.waypoints.push_back({p[0].get<double>(), p[1].get<double>()});
      }
    }
    s.number("sample_spacing_m", c.synth.sample_spacing_m);
    s.numbers("heights_m", c.synth.heights_m);
    if (const json* v = s.find("height_mean_db")) {
      if (!v->is_array()) bad(s.path("height_mean_db"), "expected an array of [height_m, mean_db]");
      for (const auto& p : *v) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
          bad(s.path("height_mean_db"), "expected an array of [height_m, mean_db]");
        }
        c.synth.height_mean_db[p[0].get<double>()] = p[1].get<double>();
      }
    }
    s.number("sample_period_s", c.synth.sample_period_s);
  });
  root.finish();
  check(c);
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = detail::read_file(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("cannot read config: ") + e.what());
  }
  PipelineConfig c = parse_config(text);
  c.base_dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  return c;
}

std::string canonical_json(const PipelineConfig& c) {
  json flights = json::array();
  for (const auto& f : c.flights) {
    flights.push_back({{"path", f.path}, {"flight_id", f.flight_id}, {"height_m", f.height_m}});
  }
  json waypoints = json::array();
  for (const auto& w : c.synth.waypoints) waypoints.push_back({w.east_m, w.north_m});
  json means = json::array();
  for (const auto& [h, m] : c.synth.height_mean_db) means.push_back({h, m});

  const json doc = {
      {"seed", c.seed},
      {"stages", c.stages},
      {"flights", flights},
      {"calibration",
       {{"power_offset_db", c.calibration.power_offset_db},
        {"altitude_drift", c.calibration.altitude_drift == AltitudeDrift::Linear ? "linear" : "none"},
        {"trim_takeoff_landing", c.calibration.trim_takeoff_landing},
        {"trim_tolerance_m", c.calibration.trim_tolerance_m}}},
      {"propagation",
       {{"bs_lat_deg", c.bs_lat_deg},
        {"bs_lon_deg", c.bs_lon_deg},
        {"carrier_hz", c.carrier_hz},
        {"tx_power_dbm", c.tx_power_dbm},
        {"epsilon0", c.epsilon0},
        {"bs_height_m", c.bs_height_m},
        {"bs_antenna", antenna_json(c.bs_antenna)},
        {"uav_antenna", antenna_json(c.uav_antenna)},
        {"model", c.model == PathLossModel::TwoRay ? "two_ray" : "free_space"},
        {"ground_reflection", c.ground_reflection}}},
      {"statistics",
       {{"histogram_bins", c.histogram_bins},
        {"bin_m", c.bin_m},
        {"dh_max_m", c.dh_max_m},
        {"random_starts", c.random_starts},
        {"fixed_a", c.fixed_a},
        {"use_fitted_model", c.use_fitted_model}}},
      {"correlation_model",
       {{"a", c.correlation.a},
        {"b1", c.correlation.b1},
        {"b2", c.correlation.b2},
        {"d_cor", c.correlation.d_cor_m},
        {"sigma_w2", c.correlation.sigma_w2}}},
      {"kriging",
       {{"r0_m", c.r0_m},
        {"m_max", c.m_max},
        {"nugget", c.nugget},
        {"mode", c.mode == KrigingMode::Rsrp ? "rsrp" : "residual"},
        {"krige", {{"pool_heights", c.krige.pool_heights}, {"target_heights", c.krige.target_heights}}}}},
      {"xval",
       {{"pool_heights", c.xval.pool_heights},
        {"target_heights", c.xval.target_heights},
        {"M", c.xval.m},
        {"N0", c.xval.n0},
        {"iterations", c.xval.iterations}}},
      {"map",
       {{"pool_heights", c.map.pool_heights},
        {"step_m", c.map.step_m},
        {"altitudes_m", c.map.altitudes_m},
        {"margin_m", c.map.margin_m}}},
      {"synth",
       {{"origin_east_m", c.synth.origin_east_m},
        {"origin_north_m", c.synth.origin_north_m},
        {"zigzag",
         {{"width_m", c.synth.zigzag.width_m},
          {"length_m", c.synth.zigzag.length_m},
          {"leg_spacing_m", c.synth.zigzag.leg_spacing_m}}},
        {"waypoints", waypoints},
        {"sample_spacing_m", c.synth.sample_spacing_m},
        {"heights_m", c.synth.heights_m},
        {"height_mean_db", means},
        {"sample_period_s", c.synth.sample_period_s}}},
  };
  return doc.dump(2);
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::Io, "SHA-256 computation failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    char buf[3];
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(detail::read_file(path)); }

std::string config_hash(const PipelineConfig& cfg) { return sha256_hex(canonical_json(cfg)); }

namespace {

AntennaPattern make_pattern(const AntennaSpec& a, const std::filesystem::path& base) {
  switch (a.kind) {
    case AntennaKind::Isotropic: return AntennaPattern::isotropic(db_to_linear(a.gain_dbi));
    case AntennaKind::Dipole: return AntennaPattern::dipole();
    case AntennaKind::Measured: {
      const std::filesystem::path p = std::filesystem::path(a.path).is_absolute() ? std::filesystem::path(a.path) : base / a.path;
      return AntennaPattern::measured(load_pattern_csv(p));
    }
  }
  return AntennaPattern::dipole();
}

}  // namespace

PropagationConfig make_propagation_config(const PipelineConfig& cfg) {
  PropagationConfig p;
  p.carrier_hz = cfg.carrier_hz;
  p.tx_power_dbm = cfg.tx_power_dbm;
  p.epsilon0 = cfg.epsilon0;
  p.bs_height_m = cfg.bs_height_m;
  p.ground_reflection = cfg.ground_reflection;
  p.bs_pattern = make_pattern(cfg.bs_antenna, cfg.base_dir);
  p.uav_pattern = make_pattern(cfg.uav_antenna, cfg.base_dir);
  validate(p);
  return p;
}

GeoLocation base_station(const PipelineConfig& cfg) {
  GeoLocation bs{cfg.bs_lat_deg, cfg.bs_lon_deg, cfg.bs_height_m};
  if (!is_valid(bs)) throw Error(ErrorCode::InvalidConfig, "base station location is invalid");
  return bs;
}

TrajectorySpec make_trajectory(const PipelineConfig& cfg) {
  TrajectorySpec t;
  GeoLocation origin = base_station(cfg);
  origin.alt_m = 0.0;
  origin = destination(origin, 90.0, cfg.synth.origin_east_m);
  origin = destination(origin, 0.0, cfg.synth.origin_north_m);
  t.origin = origin;
  t.zigzag = cfg.synth.zigzag;
  t.waypoints = cfg.synth.waypoints;
  t.sample_spacing_m = cfg.synth.sample_spacing_m;
  t.heights_m = cfg.synth.heights_m;
  return t;
}

}  // namespace a2gmap
