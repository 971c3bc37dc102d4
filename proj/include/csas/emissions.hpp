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

// Average-speed CO2 cost model.
//
// Each vehicle's cost at average speed s is
//
//   f(s) = k * (a + b s + c s^2 + d s^3 + e s^4 + f s^5 + g s^6) / s
//
// with class-specific constants. The functions here are templated on the
// scalar type so they can be evaluated in double or long double and applied
// coefficient-wise to Eigen vectors of speeds.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>

#include "csas/common.hpp"

namespace csas {

template <typename Scalar>
struct BasicEmissionFactors {
  using Coefficients = Eigen::Matrix<Scalar, 7, 1>;

  // Numerator polynomial coefficients a..g, lowest order first.
  Coefficients coeffs = Coefficients::Zero();
  Scalar k{1};

  static BasicEmissionFactors from(Scalar a, Scalar b, Scalar c, Scalar d,
                                   Scalar e = 0, Scalar f = 0, Scalar g = 0,
                                   Scalar k = 1) {
    BasicEmissionFactors out;
    out.coeffs << a, b, c, d, e, f, g;
    out.k = k;
    return out;
  }

  Scalar a() const { return coeffs[0]; }
  Scalar b() const { return coeffs[1]; }
  Scalar c() const { return coeffs[2]; }
  Scalar d() const { return coeffs[3]; }
  Scalar e() const { return coeffs[4]; }
  Scalar f() const { return coeffs[5]; }
  Scalar g() const { return coeffs[6]; }

  template <typename Other>
  BasicEmissionFactors<Other> cast() const {
    BasicEmissionFactors<Other> out;
    out.coeffs = coeffs.template cast<Other>();
    out.k = static_cast<Other>(k);
    return out;
  }

  friend bool operator==(const BasicEmissionFactors& lhs,
                         const BasicEmissionFactors& rhs) {
    return lhs.coeffs == rhs.coeffs && lhs.k == rhs.k;
  }
};

using EmissionFactors = BasicEmissionFactors<double>;

namespace detail {

template <typename Scalar>
void require_positive_speed(Scalar speed) {
  if (!(speed > Scalar(0))) {
    throw DomainError("emission model requires a positive speed");
  }
}

}  // namespace detail

/// Cost in grams per km at average speed `speed` (km/h).
template <typename Scalar>
Scalar emission_rate(const BasicEmissionFactors<Scalar>& factors,
                     Scalar speed) {
  detail::require_positive_speed(speed);
  const auto& p = factors.coeffs;
  Scalar poly = p[6];
  for (int i = 5; i >= 0; --i) poly = poly * speed + p[i];
  return factors.k * poly / speed;
}

/// d/ds of emission_rate: k * (-a/s^2 + c + 2 d s + 3 e s^2 + 4 f s^3 + 5 g s^4).
template <typename Scalar>
Scalar emission_derivative(const BasicEmissionFactors<Scalar>& factors,
                           Scalar speed) {
  detail::require_positive_speed(speed);
  const auto& p = factors.coeffs;
  Scalar tail = Scalar(5) * p[6];
  tail = tail * speed + Scalar(4) * p[5];
  tail = tail * speed + Scalar(3) * p[4];
  tail = tail * speed + Scalar(2) * p[3];
  tail = tail * speed + p[2];
  return factors.k * (tail - p[0] / (speed * speed));
}

/// d^2/ds^2 of emission_rate: k * (2a/s^3 + 2d + 6 e s + 12 f s^2 + 20 g s^3).
template <typename Scalar>
Scalar emission_second_derivative(const BasicEmissionFactors<Scalar>& factors,
                                  Scalar speed) {
  detail::require_positive_speed(speed);
  const auto& p = factors.coeffs;
  Scalar tail = Scalar(20) * p[6];
  tail = tail * speed + Scalar(12) * p[5];
  tail = tail * speed + Scalar(6) * p[4];
  tail = tail * speed + Scalar(2) * p[3];
  return factors.k * (tail + Scalar(2) * p[0] / (speed * speed * speed));
}

/// Coefficient-wise emission_rate over a vector of speeds.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> emission_rate(
    const BasicEmissionFactors<typename Derived::Scalar>& factors,
    const Eigen::MatrixBase<Derived>& speeds) {
  using Scalar = typename Derived::Scalar;
  return speeds.unaryExpr(
      [&factors](Scalar s) { return emission_rate(factors, s); });
}

enum class VehicleClass { R004, R005, R011, R012, R018, R019 };

inline constexpr std::array<VehicleClass, 6> kAllVehicleClasses = {
    VehicleClass::R004, VehicleClass::R005, VehicleClass::R011,
    VehicleClass::R012, VehicleClass::R018, VehicleClass::R019};

/// Built-in emission factors (e = f = g = 0, k = 1 for every class).
EmissionFactors factors_for(VehicleClass vc);
std::string_view to_string(VehicleClass vc);
/// Throws ConfigError for unknown names.
VehicleClass parse_vehicle_class(std::string_view name);

// Uniformly spaced speeds lo = s_0 < s_1 < ... < s_{m-1} = hi.
class SpeedGrid {
 public:
  std::size_t size() const { return static_cast<std::size_t>(speeds_.size()); }
  double lo() const { return speeds_[0]; }
  double hi() const { return speeds_[speeds_.size() - 1]; }
  double spacing() const { return spacing_; }
  double operator[](std::size_t j) const {
    return speeds_[static_cast<Eigen::Index>(j)];
  }
  const Eigen::VectorXd& speeds() const { return speeds_; }

  friend SpeedGrid build_speed_grid(std::size_t m, double lo, double hi);

 private:
  SpeedGrid(Eigen::VectorXd speeds, double spacing)
      : speeds_(std::move(speeds)), spacing_(spacing) {}

  Eigen::VectorXd speeds_;
  double spacing_ = 0.0;
};

/// Throws ConfigError unless m >= 2 and 0 < lo < hi.
SpeedGrid build_speed_grid(std::size_t m, double lo, double hi);

struct GrowthBounds {
  double d_min = 0.0;
  double d_max = 0.0;

  bool strictly_convex() const { return d_min > 0.0; }
};

// Extremes of the second derivative sampled every 0.1 km/h on [lo, hi]
// (hi is always sampled). A non-positive d_min means the cost is not
// strictly convex on the range; callers check strictly_convex().
GrowthBounds growth_bounds(const EmissionFactors& factors, double lo,
                           double hi);

inline constexpr double kGrowthSampleStep = 0.1;
inline constexpr double kDefaultSpeedLo = 5.0;
inline constexpr double kDefaultSpeedHi = 140.0;

}  // namespace csas
