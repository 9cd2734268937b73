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
#include <random>

#include <gtest/gtest.h>

#include "a2gmap/error.hpp"
#include "a2gmap/geo.hpp"
#include "test_support.hpp"

namespace a2gmap {
namespace {

TEST(HorizontalDistance, IdenticalPointsAreZero) {
  const GeoLocation a{35.7, -78.7, 30.0};
  EXPECT_EQ(horizontal_distance(a, a), 0.0);
  EXPECT_EQ(horizontal_distance_arccos(a, a), 0.0);
}

TEST(HorizontalDistance, OneDegreeOfLatitudeAtTheEquator) {
  const GeoLocation a{0.0, 10.0, 0.0};
  const GeoLocation b{1.0, 10.0, 0.0};
  EXPECT_NEAR(horizontal_distance(a, b), 111319.49, 0.01);
  EXPECT_NEAR(horizontal_distance(a, b), kEarthRadiusM * kPi / 180.0, 1e-6);
}

TEST(HorizontalDistance, SymmetricAndAltitudeBlind) {
  const GeoLocation a{35.72, -78.70, 10.0};
  const GeoLocation b{35.73, -78.69, 110.0};
  EXPECT_DOUBLE_EQ(horizontal_distance(a, b), horizontal_distance(b, a));
  EXPECT_DOUBLE_EQ(horizontal_distance(a, b), horizontal_distance({a.lat_deg, a.lon_deg, 0.0}, b));
}

// The literal arccos form and the haversine evaluation agree wherever the
// arccos form still has precision to spare.
TEST(HorizontalDistance, MatchesArccosFormBeyondAKilometre) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lat(-60.0, 60.0), lon(-180.0, 180.0), off(0.01, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const GeoLocation a{lat(rng), lon(rng), 0.0};
    const GeoLocation b{a.lat_deg + off(rng), a.lon_deg + off(rng), 0.0};
    const double d = horizontal_distance(a, b);
    EXPECT_NEAR(horizontal_distance_arccos(a, b), d, 1e-6 * d + 1e-3);
  }
}

TEST(HorizontalDistance, UnitVectorFormAgrees) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> jitter(-0.01, 0.01);
  const GeoLocation base = testing::site();
  for (int i = 0; i < 500; ++i) {
    const GeoLocation a{base.lat_deg + jitter(rng), base.lon_deg + jitter(rng), 0.0};
    const GeoLocation b{base.lat_deg + jitter(rng), base.lon_deg + jitter(rng), 0.0};
    const double d = horizontal_distance(a, b);
    EXPECT_NEAR(horizontal_distance(to_unit_vector(a), to_unit_vector(b)), d, 1e-9 * d + 1e-9);
  }
}

TEST(HorizontalDistance, MetricPropertiesOnASmallRegion) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> jitter(-0.005, 0.005);
  const GeoLocation base = testing::site();
  for (int i = 0; i < 300; ++i) {
    const GeoLocation a{base.lat_deg + jitter(rng), base.lon_deg + jitter(rng), 0.0};
    const GeoLocation b{base.lat_deg + jitter(rng), base.lon_deg + jitter(rng), 0.0};
    const GeoLocation c{base.lat_deg + jitter(rng), base.lon_deg + jitter(rng), 0.0};
    EXPECT_GT(horizontal_distance(a, b), 0.0);
    EXPECT_LE(horizontal_distance(a, c), horizontal_distance(a, b) + horizontal_distance(b, c) + 1e-9);
  }
}

TEST(Destination, TravelsTheRequestedDistance) {
  const GeoLocation a = testing::site();
  for (double bearing : {0.0, 37.0, 90.0, 181.0, 300.0}) {
    for (double d : {2.0, 50.0, 1234.5}) {
      const GeoLocation b = destination(a, bearing, d);
      EXPECT_NEAR(horizontal_distance(a, b), d, 1e-9 * d + 1e-9);
      EXPECT_NEAR(std::fmod(bearing_deg(a, b) + 360.0 - bearing + 180.0, 360.0) - 180.0, 0.0, 1e-6);
    }
  }
}

TEST(Validate, RejectsOutOfRangeCoordinates) {
  EXPECT_NO_THROW(validate(GeoLocation{90.0, 180.0, 0.0}));
  EXPECT_THROW(validate(GeoLocation{91.0, 0.0, 0.0}), Error);
  EXPECT_THROW(validate(GeoLocation{0.0, -181.0, 0.0}), Error);
  EXPECT_THROW(validate(GeoLocation{0.0, 0.0, -1.0}), Error);
  EXPECT_THROW(validate(GeoLocation{0.0, 0.0, std::nan("")}), Error);
  EXPECT_FALSE(is_valid({0.0, 0.0, INFINITY}));
}

// Places a UAV at a given horizontal offset due north of the BS.
GeoLocation north_of(const GeoLocation& bs, double d_h, double alt) {
  GeoLocation p = destination(bs, 0.0, d_h);
  p.alt_m = alt;
  return p;
}

TEST(LinkGeometry, FortyFiveDegrees) {
  const GeoLocation bs = testing::site(0.0);
  const LinkGeometry g = link_geometry(bs, north_of(bs, 100.0, 100.0));
  EXPECT_NEAR(g.theta_l, kPi / 4.0, 1e-9);
  EXPECT_NEAR(g.d_3d, 141.421356, 1e-5);
  EXPECT_NEAR(g.azimuth_deg, 0.0, 1e-6);
}

TEST(LinkGeometry, OverheadLimit) {
  const GeoLocation bs = testing::site(10.0);
  const LinkGeometry g = link_geometry(bs, north_of(bs, 0.001, 110.0));
  EXPECT_NEAR(g.theta_l, kPi / 2.0, 1e-4);
}

TEST(LinkGeometry, ImageMethodReflectedPath) {
  const GeoLocation bs = testing::site(10.0);
  const LinkGeometry g = link_geometry(bs, north_of(bs, 300.0, 30.0));
  EXPECT_NEAR(g.reflected_path_len, std::sqrt(300.0 * 300.0 + 40.0 * 40.0), 1e-6);
  EXPECT_NEAR(g.reflected_path_len, 302.655, 1e-3);
  EXPECT_NEAR(g.d_v, 20.0, 1e-12);
  EXPECT_NEAR(g.theta_r, std::atan(40.0 / 300.0), 1e-9);
}

TEST(LinkGeometry, CoLocatedThrows) {
  const GeoLocation bs = testing::site(10.0);
  try {
    link_geometry(bs, bs);
    FAIL() << "expected CoLocated";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CoLocated);
  }
}

TEST(LinkGeometry, InvariantsOnRandomLinks) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> dist(0.0, 2000.0), brg(0.0, 360.0), h(0.5, 150.0);
  const GeoLocation base = testing::site();
  for (int i = 0; i < 2000; ++i) {
    const GeoLocation bs{base.lat_deg, base.lon_deg, h(rng)};
    GeoLocation uav = destination(bs, brg(rng), dist(rng));
    uav.alt_m = h(rng);
    const LinkGeometry g = link_geometry(bs, uav);
    EXPECT_NEAR(g.d_3d * g.d_3d, g.d_h * g.d_h + g.d_v * g.d_v, 1e-6 * g.d_3d * g.d_3d);
    EXPECT_GE(g.d_3d + 1e-9, std::max(g.d_h, g.d_v));
    EXPECT_GE(g.reflected_path_len + 1e-9, g.d_3d);
    EXPECT_GE(g.delta_tau, 0.0);
    if (g.d_h > 1e-6) {
      EXPECT_GT(g.theta_r, g.theta_l);
    }
  }
}

}  // namespace
}  // namespace a2gmap
