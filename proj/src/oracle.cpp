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

#include "csas/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace csas {

OracleResult brute_force_optimum(std::span<const Vehicle> fleet, double lo,
                                 double hi, double resolution) {
  if (!(resolution > 0.0)) throw ConfigError("oracle resolution must be positive");
  if (fleet.empty()) throw ConfigError("oracle needs a nonempty fleet");
  if (!(lo > 0.0) || !(lo <= hi)) throw ConfigError("oracle requires 0 < lo <= hi");

  // Integer multiples keep the evaluation points free of accumulated error.
  const auto first = static_cast<long long>(std::ceil(lo / resolution - 1e-9));
  const auto last = static_cast<long long>(std::floor(hi / resolution + 1e-9));
  if (first > last) throw ConfigError("oracle range contains no grid point");

  OracleResult best;
  best.resolution = resolution;
  for (long long k = first; k <= last; ++k) {
    const double s = static_cast<double>(k) * resolution;
    const double f = total_cost(fleet, s);
    if (k == first || f < best.f_star) {
      best.s_star = s;
      best.f_star = f;
    }
  }
  return best;
}

double accuracy(double recommended, std::span<const Vehicle> fleet,
                const OracleResult& oracle) {
  // The oracle only resolves s* to its grid; a speed off that grid can land
  // marginally below f_star, which still counts as optimal.
  return std::min(1.0, oracle.f_star / total_cost(fleet, recommended));
}

}  // namespace csas
