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
#include <string>

#include <gtest/gtest.h>

#include "a2gmap/error.hpp"
#include "a2gmap/measurement.hpp"
#include "test_support.hpp"

namespace a2gmap {
namespace {

std::string drifting_flight() {
  // 61 samples at 1 s; the altimeter drifts by +6 m over the flight.
  std::string csv = "t_s,lat_deg,lon_deg,alt_m,rsrp_dbm\n";
  for (int i = 0; i <= 60; ++i) {
    const double alt = 50.0 + 6.0 * i / 60.0;
    csv += std::to_string(i) + ",35.7275," + std::to_string(-78.696 + 1e-5 * i) + "," + std::to_string(alt) +
           ",-" + std::to_string(170 + i % 7) + "\n";
  }
  return csv;
}

TEST(Calibration, RemovesLinearDriftAndAddsOffset) {
  const MeasurementSet raw = parse_measurements(drifting_flight(), {3, 50.0});
  CalibrationSpec cal;
  cal.trim_takeoff_landing = false;
  const MeasurementSet out = apply_calibration(raw, cal);
  ASSERT_EQ(out.size(), raw.size());
  EXPECT_TRUE(out.calibrated);
  EXPECT_NEAR(out.samples.back().loc.alt_m, out.samples.front().loc.alt_m, 1e-9);
  // midpoint carried +3 m of drift
  EXPECT_NEAR(out.samples[30].loc.alt_m, raw.samples[30].loc.alt_m - 3.0, 1e-9);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    EXPECT_NEAR(out.samples[i].rsrp_dbm, raw.samples[i].rsrp_dbm + 98.0, 1e-12);
    EXPECT_EQ(out.samples[i].flight_id, 3);
  }
}

TEST(Calibration, RefusesASecondPass) {
  const MeasurementSet once = apply_calibration(parse_measurements(drifting_flight(), {1, 50.0}), {});
  try {
    apply_calibration(once, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AlreadyCalibrated);
  }
}

TEST(Calibration, TrimsTakeOffAndLanding) {
  std::string csv = "t_s,lat_deg,lon_deg,alt_m,rsrp_dbm\n";
  int t = 0;
  for (int a = 0; a < 70; a += 10) csv += std::to_string(t++) + ",35.7,-78.6," + std::to_string(a) + ",-170\n";
  for (int i = 0; i < 40; ++i) csv += std::to_string(t++) + ",35.7,-78.6,70.2,-170\n";
  for (int a = 60; a >= 0; a -= 10) csv += std::to_string(t++) + ",35.7,-78.6," + std::to_string(a) + ",-170\n";
  CalibrationSpec cal;
  cal.altitude_drift = AltitudeDrift::None;
  const MeasurementSet out = apply_calibration(parse_measurements(csv, {1, 70.0}), cal);
  EXPECT_EQ(out.size(), 40u);
  for (const auto& s : out.samples) EXPECT_DOUBLE_EQ(s.loc.alt_m, 70.2);
}

TEST(Parse, SchemaErrorNamesTheLine) {
  const std::string csv = "t_s,lat_deg,lon_deg,alt_m,rsrp_dbm\n0,35.7,-78.6,50,-80\n1,35.7,-78.6,fifty,-80\n";
  try {
    parse_measurements(csv, {}, "f.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SchemaError);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Parse, RejectsBadHeaderAndWidth) {
  EXPECT_THROW(parse_measurements("time,lat,lon,alt,rsrp\n", {}), Error);
  EXPECT_THROW(parse_measurements("", {}), Error);
  EXPECT_THROW(parse_measurements("t_s,lat_deg,lon_deg,alt_m,rsrp_dbm\n0,35.7,-78.6,50\n", {}), Error);
  EXPECT_THROW(parse_measurements("t_s,lat_deg,lon_deg,alt_m,rsrp_dbm\n0,95.0,-78.6,50,-80\n", {}), Error);
}

TEST(Parse, NonMonotonicTime) {
  const std::string csv = "t_s,lat_deg,lon_deg,alt_m,rsrp_dbm\n0,35.7,-78.6,50,-80\n2,35.7,-78.6,50,-80\n"
                          "2,35.7,-78.6,50,-80\n";
  try {
    parse_measurements(csv, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonMonotonicTime);
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos);
  }
}

TEST(Calibration, RejectsImplausiblePower) {
  // -10 dBm raw plus the 98 dB offset lands above 0 dBm
  const std::string csv = "t_s,lat_deg,lon_deg,alt_m,rsrp_dbm\n0,35.7,-78.6,50,-10\n1,35.7,-78.6,50,-10\n";
  EXPECT_THROW(apply_calibration(parse_measurements(csv, {}), {}), Error);
}

TEST(RoundTrip, TwelveSignificantDigits) {
  MeasurementSet set;
  for (int i = 0; i < 20; ++i) {
    Sample s;
    s.t_s = 0.1 * i + 1.0 / 3.0;
    s.loc = {35.727512345678 + 1e-7 * i, -78.696098765432, 70.123456789};
    s.rsrp_dbm = -81.23456789012 + 0.01 * i;
    s.true_pl_db = 91.111111111;
    s.true_w_db = -2.5 + i;
    set.samples.push_back(s);
  }
  const std::string text = format_measurements(set, true);
  const MeasurementSet back = parse_measurements(text, {});
  ASSERT_EQ(back.size(), set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    EXPECT_NEAR(back[i].t_s, set[i].t_s, 1e-11 * std::abs(set[i].t_s));
    EXPECT_NEAR(back[i].loc.lat_deg, set[i].loc.lat_deg, 1e-10);
    EXPECT_NEAR(back[i].loc.lon_deg, set[i].loc.lon_deg, 1e-10);
    EXPECT_NEAR(back[i].rsrp_dbm, set[i].rsrp_dbm, 1e-10);
    EXPECT_NEAR(*back[i].true_w_db, *set[i].true_w_db, 1e-10);
  }
  // a second pass is byte-stable
  EXPECT_EQ(format_measurements(back, true), text);
}

TEST(RoundTrip, ThroughAFile) {
  testing::TempDir dir("meas");
  MeasurementSet set = parse_measurements(drifting_flight(), {});
  write_measurements(dir.path() / "f.csv", set, false, 0.0);
  CalibrationSpec cal;
  cal.altitude_drift = AltitudeDrift::None;
  cal.trim_takeoff_landing = false;
  cal.power_offset_db = 90.0;
  const MeasurementSet back = load_measurements(dir.path() / "f.csv", cal, {7, 50.0});
  ASSERT_EQ(back.size(), set.size());
  EXPECT_EQ(back[0].flight_id, 7);
  EXPECT_NEAR(back[5].rsrp_dbm, set[5].rsrp_dbm + 90.0, 1e-9);
  EXPECT_THROW(load_measurements(dir.path() / "missing.csv", cal), Error);
}

TEST(Set, FlightsAndAppend) {
  MeasurementSet a, b;
  a.samples.resize(3);
  b.samples.resize(2);
  for (auto& s : b.samples) s.flight_id = 4;
  append(a, b);
  EXPECT_EQ(a.flight_ids(), (std::vector<int>{0, 4}));
  EXPECT_EQ(a.flight(4).size(), 2u);
  MeasurementSet c;
  c.calibrated = true;
  c.samples.resize(1);
  EXPECT_THROW(append(a, c), Error);
}

TEST(ModalAltitude, MostPopulatedBin) {
  MeasurementSet f;
  for (double alt : {10.2, 50.1, 50.3, 50.7, 90.0, 90.5}) {
    Sample s;
    s.loc.alt_m = alt;
    f.samples.push_back(s);
  }
  EXPECT_NEAR(modal_altitude(f), (50.1 + 50.3 + 50.7) / 3.0, 1e-12);
}

}  // namespace
}  // namespace a2gmap
