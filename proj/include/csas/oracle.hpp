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

// Ground truth for the common-speed problem: minimise the total fleet cost
// F(s) = sum_i f_i(s) by exhaustive evaluation on a fine grid.

#include <span>

#include "csas/fleet.hpp"

namespace csas {

inline constexpr double kDefaultOracleResolution = 0.01;

struct OracleResult {
  double s_star = 0.0;
  double f_star = 0.0;
  double resolution = kDefaultOracleResolution;
};

/// Evaluates F at every multiple of `resolution` inside [lo, hi]; the lowest
/// speed wins ties.
OracleResult brute_force_optimum(std::span<const Vehicle> fleet, double lo,
                                 double hi,
                                 double resolution = kDefaultOracleResolution);

/// min(1, F(s_star) / F(recommended)); 1 at the optimum.
double accuracy(double recommended, std::span<const Vehicle> fleet,
                const OracleResult& oracle);

}  // namespace csas
