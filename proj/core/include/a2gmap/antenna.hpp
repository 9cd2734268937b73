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

#ifndef A2GMAP_ANTENNA_HPP
#define A2GMAP_ANTENNA_HPP

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace a2gmap {

// Measured gain on an (azimuth, elevation) lattice. Gains are linear and
// stored azimuth-major: gain_linear[i_az * elevation_deg.size() + i_el].
class PatternGrid {
 public:
  PatternGrid(std::vector<double> azimuth_deg, std::vector<double> elevation_deg,
              std::vector<double> gain_linear);

  const std::vector<double>& azimuth_deg() const noexcept { return azimuth_; }
  const std::vector<double>& elevation_deg() const noexcept { return elevation_; }
  const std::vector<double>& gain_linear() const noexcept { return gain_; }

  double at(std::size_t i_az, std::size_t i_el) const { return gain_[i_az * elevation_.size() + i_el]; }

  // Bilinear interpolation; azimuth wraps modulo 360, elevation outside the
  // sampled span is clamped to the nearest edge row.
  double interpolate(double azimuth_deg, double elevation_deg) const;

 private:
  std::vector<double> azimuth_;
  std::vector<double> elevation_;
  std::vector<double> gain_;
};

// Reads `azimuth_deg,elevation_deg,gain_dbi` rows in any order and checks
// full rectangular coverage. Gains are converted dBi -> linear.
PatternGrid load_pattern_csv(const std::filesystem::path& path);
PatternGrid parse_pattern_csv(const std::string& text, const std::string& source_name = "<memory>");

struct DipolePattern {};

struct IsotropicPattern {
  double gain_linear = 1.0;
};

class AntennaPattern {
 public:
  using Source = std::variant<PatternGrid, DipolePattern, IsotropicPattern>;

  static AntennaPattern measured(PatternGrid grid);
  static AntennaPattern dipole();
  static AntennaPattern isotropic(double gain_linear = 1.0);

  const Source& source() const noexcept { return source_; }
  std::string kind() const;

  // Linear gain towards (azimuth, elevation), both in degrees. Elevation is
  // measured from the horizontal plane and must lie in [-90, 90].
  double gain(double azimuth_deg, double elevation_deg) const;

 private:
  explicit AntennaPattern(Source source) : source_(std::move(source)) {}
  Source source_;
};

// Half-wave dipole field pattern cos(pi/2 cos(t)) / sin(t) with t the polar
// angle from the (vertical) dipole axis, in degrees. Returns 0 when
// sin(t) < 1e-9, the limit of the expression at the axis.
double dipole_gain_polar(double polar_deg) noexcept;

// G_bs * G_uav at the same angles.
double combined_gain(const AntennaPattern& bs, const AntennaPattern& uav, double azimuth_deg,
                     double elevation_deg);

// 10 log10 with gains below 1e-12 clamped to 1e-12.
double linear_to_db(double gain_linear) noexcept;
double db_to_linear(double db) noexcept;

}  // namespace a2gmap

#endif  // A2GMAP_ANTENNA_HPP
