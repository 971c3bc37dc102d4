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

#include "csas/fixed_point.hpp"

#include <cmath>
#include <string>

#include "csas/common.hpp"

namespace csas {

FixedPoint FixedPoint::from_raw(std::int64_t raw) {
  if (!fits_wire(raw)) {
    throw EncodingError("fixed-point value " + std::to_string(raw) +
                        " exceeds the 32-bit wire range");
  }
  return FixedPoint(raw);
}

FixedPoint FixedPoint::from_real(double value) {
  const double scaled = value * static_cast<double>(kFixedScale);
  if (!std::isfinite(scaled) || std::fabs(scaled) > static_cast<double>(kWireMax)) {
    throw EncodingError("value " + std::to_string(value) +
                        " exceeds the 32-bit wire range");
  }
  return from_raw(std::llround(scaled));
}

void check_wire_range(const FixedVector& values) {
  for (Eigen::Index j = 0; j < values.size(); ++j) {
    if (!fits_wire(values[j])) {
      throw EncodingError("aggregate entry " + std::to_string(values[j]) +
                          " exceeds the 32-bit wire range");
    }
  }
}

}  // namespace csas
