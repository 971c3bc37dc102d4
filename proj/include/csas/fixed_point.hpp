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

// Fixed-point encoding for masked costs and shares.
//
// A value v is stored as the integer round(v * 1000). Every stored integer
// must fit a signed 32-bit wire field; arithmetic is carried out in 64 bits
// and range-checked, so sums of shares are exact.

#include <Eigen/Dense>

#include <compare>
#include <cstdint>

namespace csas {

inline constexpr std::int64_t kFixedScale = 1000;
inline constexpr std::int64_t kWireMax = (std::int64_t{1} << 31) - 1;
inline constexpr std::int64_t kWireMin = -(std::int64_t{1} << 31) + 1;

/// Raw fixed-point units, one entry per grid point.
using FixedVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

class FixedPoint {
 public:
  constexpr FixedPoint() = default;

  /// Throws EncodingError outside the wire range.
  static FixedPoint from_raw(std::int64_t raw);
  /// Rounds half away from zero. Throws EncodingError outside the wire range.
  static FixedPoint from_real(double value);

  constexpr std::int64_t raw() const { return raw_; }
  double to_real() const {
    return static_cast<double>(raw_) / static_cast<double>(kFixedScale);
  }

  friend FixedPoint operator+(FixedPoint lhs, FixedPoint rhs) {
    return from_raw(lhs.raw_ + rhs.raw_);
  }
  friend FixedPoint operator-(FixedPoint lhs, FixedPoint rhs) {
    return from_raw(lhs.raw_ - rhs.raw_);
  }
  friend constexpr auto operator<=>(FixedPoint, FixedPoint) = default;

 private:
  explicit constexpr FixedPoint(std::int64_t raw) : raw_(raw) {}

  std::int64_t raw_ = 0;
};

constexpr bool fits_wire(std::int64_t raw) {
  return raw >= kWireMin && raw <= kWireMax;
}

/// Throws EncodingError if any entry is outside the wire range.
void check_wire_range(const FixedVector& values);

/// Real-valued view of a fixed-point vector.
inline Eigen::VectorXd to_real(const FixedVector& values) {
  return values.cast<double>() / static_cast<double>(kFixedScale);
}

}  // namespace csas
