// Copyright 2026 The CSAS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "csas/emissions.hpp"

#include <algorithm>
#include <string>

namespace csas {

EmissionFactors factors_for(VehicleClass vc) {
  switch (vc) {
    case VehicleClass::R004:
      return EmissionFactors::from(2.2606E+3, 7.0183E+1, 2.9263E-1, 3.0199E-3);
    case VehicleClass::R005:
      return EmissionFactors::from(2.2606E+3, 5.9444E+1, 2.9263E-1, 3.0199E-3);
    case VehicleClass::R011:
      return EmissionFactors::from(2.5324E+3, 1.1834E+2, -4.3167E-1,
                                   6.6776E-3);
    case VehicleClass::R012:
      return EmissionFactors::from(2.5324E+3, 1.0340E+2, -4.3167E-1,
                                   6.6776E-3);
    case VehicleClass::R018:
      return EmissionFactors::from(3.7473E+3, 1.6774E+2, -8.5270E-1,
                                   1.0318E-2);
    case VehicleClass::R019:
      return EmissionFactors::from(3.7473E+3, 1.5599E+2, -8.5270E-1,
                                   1.0318E-2);
  }
  throw ConfigError("unknown vehicle class");
}

std::string_view to_string(VehicleClass vc) {
  switch (vc) {
    case VehicleClass::R004: return "R004";
    case VehicleClass::R005: return "R005";
    case VehicleClass::R011: return "R011";
    case VehicleClass::R012: return "R012";
    case VehicleClass::R018: return "R018";
    case VehicleClass::R019: return "R019";
  }
  return "?";
}

VehicleClass parse_vehicle_class(std::string_view name) {
  for (VehicleClass vc : kAllVehicleClasses) {
    if (to_string(vc) == name) return vc;
  }
  throw ConfigError("unknown vehicle class '" + std::string(name) + "'");
}

SpeedGrid build_speed_grid(std::size_t m, double lo, double hi) {
  if (m < 2) throw ConfigError("speed grid needs at least two points");
  if (!(lo > 0.0)) throw ConfigError("speed grid lower bound must be positive");
  if (!(lo < hi)) throw ConfigError("speed grid requires lo < hi");
  const double spacing = (hi - lo) / static_cast<double>(m - 1);
  Eigen::VectorXd speeds(static_cast<Eigen::Index>(m));
  for (std::size_t j = 0; j + 1 < m; ++j) {
    speeds[static_cast<Eigen::Index>(j)] = lo + static_cast<double>(j) * spacing;
  }
  speeds[static_cast<Eigen::Index>(m - 1)] = hi;
  return SpeedGrid(std::move(speeds), spacing);
}

GrowthBounds growth_bounds(const EmissionFactors& factors, double lo,
                           double hi) {
  if (!(lo > 0.0) || !(lo < hi)) {
    throw ConfigError("growth bounds require 0 < lo < hi");
  }
  const auto steps =
      static_cast<std::size_t>(std::floor((hi - lo) / kGrowthSampleStep + 1e-9));
  GrowthBounds out;
  out.d_min = emission_second_derivative(factors, lo);
  out.d_max = out.d_min;
  auto visit = [&](double s) {
    const double v = emission_second_derivative(factors, s);
    out.d_min = std::min(out.d_min, v);
    out.d_max = std::max(out.d_max, v);
  };
  for (std::size_t i = 1; i <= steps; ++i) {
    visit(lo + static_cast<double>(i) * kGrowthSampleStep);
  }
  visit(hi);
  return out;
}

}  // namespace csas
