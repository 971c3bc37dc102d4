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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace csas {
namespace {

TEST(EmissionRate, ConstantCostFunction) {
  const auto unit = EmissionFactors::from(0, 1, 0, 0);
  EXPECT_DOUBLE_EQ(emission_rate(unit, 40.0), 1.0);
}

TEST(EmissionRate, R004At100IsGolden) {
  // (2260.6 + 7018.3 + 2926.3 + 3019.9) / 100, evaluated with mpmath.
  EXPECT_NEAR(emission_rate(factors_for(VehicleClass::R004), 100.0), 152.251,
              1e-12);
}

TEST(EmissionRate, RejectsNonPositiveSpeed) {
  const auto f = factors_for(VehicleClass::R004);
  EXPECT_THROW(emission_rate(f, 0.0), DomainError);
  EXPECT_THROW(emission_rate(f, -3.0), DomainError);
  EXPECT_THROW(emission_derivative(f, 0.0), DomainError);
}

TEST(EmissionRate, AppliesScaleAndHigherOrderTerms) {
  const auto f = EmissionFactors::from(1, 2, 3, 4, 5, 6, 7, 0.5);
  const double s = 1.5;
  const double poly = 1 + 2 * s + 3 * s * s + 4 * std::pow(s, 3) +
                      5 * std::pow(s, 4) + 6 * std::pow(s, 5) + 7 * std::pow(s, 6);
  EXPECT_NEAR(emission_rate(f, s), 0.5 * poly / s, 1e-12);
}

TEST(EmissionRate, VectorOverloadMatchesScalar) {
  const auto f = factors_for(VehicleClass::R011);
  const Eigen::VectorXd speeds = Eigen::VectorXd::LinSpaced(7, 10.0, 130.0);
  const Eigen::VectorXd out = emission_rate(f, speeds);
  for (Eigen::Index j = 0; j < speeds.size(); ++j) {
    EXPECT_EQ(out[j], emission_rate(f, speeds[j]));
  }
}

TEST(EmissionRate, PositiveOnSpeedRangeForAllClasses) {
  for (VehicleClass vc : kAllVehicleClasses) {
    const auto f = factors_for(vc);
    for (double s = 5.0; s <= 140.0; s += 0.5) {
      EXPECT_GT(emission_rate(f, s), 0.0) << to_string(vc) << " at " << s;
    }
  }
}

TEST(EmissionRate, InteriorMinimumForR004) {
  const auto f = factors_for(VehicleClass::R004);
  const double mid = emission_rate(f, 60.0);
  EXPECT_LT(mid, emission_rate(f, 5.0));
  EXPECT_LT(mid, emission_rate(f, 140.0));
}

TEST(EmissionFactors, TableValuesMatch) {
  const auto r004 = factors_for(VehicleClass::R004);
  EXPECT_EQ(r004.a(), 2.2606E+3);
  EXPECT_EQ(r004.b(), 7.0183E+1);
  EXPECT_EQ(r004.c(), 2.9263E-1);
  EXPECT_EQ(r004.d(), 3.0199E-3);
  const auto r019 = factors_for(VehicleClass::R019);
  EXPECT_EQ(r019.a(), 3.7473E+3);
  EXPECT_EQ(r019.b(), 1.5599E+2);
  EXPECT_EQ(r019.c(), -8.5270E-1);
  EXPECT_EQ(r019.d(), 1.0318E-2);
  for (VehicleClass vc : kAllVehicleClasses) {
    const auto f = factors_for(vc);
    EXPECT_EQ(f.e(), 0.0);
    EXPECT_EQ(f.f(), 0.0);
    EXPECT_EQ(f.g(), 0.0);
    EXPECT_EQ(f.k, 1.0);
    EXPECT_EQ(parse_vehicle_class(to_string(vc)), vc);
  }
  EXPECT_THROW(parse_vehicle_class("R999"), ConfigError);
}

TEST(EmissionDerivative, ConstantFunctionHasZeroSlope) {
  const auto unit = EmissionFactors::from(0, 1, 0, 0);
  EXPECT_EQ(emission_derivative(unit, 17.0), 0.0);
}

// Oracle: central differences of emission_rate evaluated in long double.
TEST(EmissionDerivative, MatchesFiniteDifferences) {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> speed(5.0, 140.0);
  const long double h = 1e-4L;
  for (VehicleClass vc : kAllVehicleClasses) {
    const auto f = factors_for(vc);
    const auto fl = f.cast<long double>();
    for (int i = 0; i < 1000; ++i) {
      const double s = speed(rng);
      const long double sl = s;
      const long double fd =
          (emission_rate(fl, sl + h) - emission_rate(fl, sl - h)) / (2 * h);
      const double analytic = emission_derivative(f, s);
      const double rel = static_cast<double>(std::fabs((analytic - fd) / fd));
      ASSERT_LT(rel, 1e-6) << to_string(vc) << " at " << s;
    }
  }
}

TEST(EmissionDerivative, SignChangeNearR004Minimum) {
  const auto f = factors_for(VehicleClass::R004);
  EXPECT_LT(emission_derivative(f, 40.0), 0.0);
  EXPECT_GT(emission_derivative(f, 80.0), 0.0);
  // Scan at 0.01 km/h for the sign change; the root is 59.0154... (mpmath).
  double root = 0.0;
  for (double s = 40.0; s < 80.0; s += 0.01) {
    if (emission_derivative(f, s) < 0.0 && emission_derivative(f, s + 0.01) >= 0.0) {
      root = s;
      break;
    }
  }
  EXPECT_NEAR(root, 59.0154354513746, 0.011);
}

TEST(EmissionSecondDerivative, StrictlyConvexOnRange) {
  // Second central difference of the cost itself, independent of f''.
  const double h = 0.5;
  for (VehicleClass vc : kAllVehicleClasses) {
    const auto f = factors_for(vc);
    for (double s = 5.0 + h; s <= 140.0 - h + 1e-9; s += h) {
      const double d2 =
          emission_rate(f, s - h) - 2 * emission_rate(f, s) + emission_rate(f, s + h);
      EXPECT_GT(d2, 0.0) << to_string(vc) << " at " << s;
    }
  }
}

TEST(GrowthBounds, LinearCostIsFlagged) {
  const auto linear = EmissionFactors::from(0, 0, 1, 0);
  const GrowthBounds gb = growth_bounds(linear, 5.0, 140.0);
  EXPECT_EQ(gb.d_min, 0.0);
  EXPECT_EQ(gb.d_max, 0.0);
  EXPECT_FALSE(gb.strictly_convex());
}

TEST(GrowthBounds, PureQuadraticHasConstantCurvature) {
  const auto square = EmissionFactors::from(0, 0, 0, 1);  // f(s) = s^2
  const GrowthBounds gb = growth_bounds(square, 5.0, 140.0);
  EXPECT_DOUBLE_EQ(gb.d_min, 2.0);
  EXPECT_DOUBLE_EQ(gb.d_max, 2.0);
}

TEST(GrowthBounds, TableClassesAreStrictlyConvex) {
  for (VehicleClass vc : kAllVehicleClasses) {
    const auto f = factors_for(vc);
    const GrowthBounds gb = growth_bounds(f, 5.0, 140.0);
    EXPECT_TRUE(gb.strictly_convex()) << to_string(vc);
    EXPECT_TRUE(std::isfinite(gb.d_max));
    EXPECT_LE(gb.d_min, gb.d_max);
    // Grid scan oracle: f'' = 2a/s^3 + 2d is decreasing, so extremes sit at
    // the endpoints.
    EXPECT_NEAR(gb.d_max, 2 * f.a() / 125.0 + 2 * f.d(), 1e-12);
    EXPECT_NEAR(gb.d_min, 2 * f.a() / std::pow(140.0, 3) + 2 * f.d(), 1e-12);
  }
}

TEST(GrowthBounds, RejectsBadRange) {
  const auto f = factors_for(VehicleClass::R004);
  EXPECT_THROW(growth_bounds(f, 10.0, 10.0), ConfigError);
  EXPECT_THROW(growth_bounds(f, 0.0, 10.0), ConfigError);
}

TEST(SpeedGrid, EndpointsOnly) {
  const auto g = build_speed_grid(2, 5, 140);
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g[0], 5.0);
  EXPECT_EQ(g[1], 140.0);
}

TEST(SpeedGrid, HundredPoints) {
  const auto g = build_speed_grid(100, 5, 140);
  ASSERT_EQ(g.size(), 100u);
  EXPECT_DOUBLE_EQ(g.spacing(), 135.0 / 99.0);
}

TEST(SpeedGrid, TenPointsSpacedBy15) {
  const auto g = build_speed_grid(10, 5, 140);
  ASSERT_EQ(g.size(), 10u);
  for (std::size_t j = 0; j < 10; ++j) EXPECT_DOUBLE_EQ(g[j], 5.0 + 15.0 * j);
}

TEST(SpeedGrid, UniformForManySizes) {
  for (std::size_t m = 2; m <= 300; ++m) {
    const auto g = build_speed_grid(m, 5, 140);
    ASSERT_EQ(g.size(), m);
    EXPECT_EQ(g.lo(), 5.0);
    EXPECT_EQ(g.hi(), 140.0);
    for (std::size_t j = 1; j < m; ++j) {
      const double step = g[j] - g[j - 1];
      EXPECT_NEAR(step, g.spacing(), 1e-12 * 140.0);
      EXPECT_GT(step, 0.0);
    }
  }
}

TEST(SpeedGrid, RejectsBadConfiguration) {
  EXPECT_THROW(build_speed_grid(1, 5, 140), ConfigError);
  EXPECT_THROW(build_speed_grid(10, 140, 5), ConfigError);
  EXPECT_THROW(build_speed_grid(10, 5, 5), ConfigError);
  EXPECT_THROW(build_speed_grid(10, 0, 5), ConfigError);
}

}  // namespace
}  // namespace csas
