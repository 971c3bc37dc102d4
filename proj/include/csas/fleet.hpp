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

#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

#include "csas/common.hpp"
#include "csas/emissions.hpp"

namespace csas {

struct Vehicle {
  VehicleId id;
  EmissionFactors factors;
  std::string label;  // class name or "custom"
};

using Fleet = std::vector<Vehicle>;

/// Sum of every vehicle's cost at a common speed, in ascending fleet order.
inline double total_cost(std::span<const Vehicle> fleet, double speed) {
  double sum = 0.0;
  for (const auto& v : fleet) sum += emission_rate(v.factors, speed);
  return sum;
}

inline Eigen::VectorXd total_cost(std::span<const Vehicle> fleet,
                                  const Eigen::VectorXd& speeds) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(speeds.size());
  for (const auto& v : fleet) out += emission_rate(v.factors, speeds);
  return out;
}

/// One vehicle per class, ids 1..6 in class order.
inline Fleet one_per_class() {
  Fleet fleet;
  std::int32_t next = 1;
  for (VehicleClass vc : kAllVehicleClasses) {
    fleet.push_back({VehicleId{next++}, factors_for(vc), std::string(to_string(vc))});
  }
  return fleet;
}

/// `per_class` vehicles of each class, grouped by class, ids 1..6*per_class.
inline Fleet uniform_fleet(std::size_t per_class) {
  Fleet fleet;
  std::int32_t next = 1;
  for (VehicleClass vc : kAllVehicleClasses) {
    for (std::size_t i = 0; i < per_class; ++i) {
      fleet.push_back(
          {VehicleId{next++}, factors_for(vc), std::string(to_string(vc))});
    }
  }
  return fleet;
}

}  // namespace csas
