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

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>

namespace csas {

// Vehicle identifier. Fleet vehicles use ids >= 1; id 0 is reserved for the
// base-station-resident dummy participant.
struct VehicleId {
  std::int32_t value = 0;

  friend constexpr auto operator<=>(VehicleId, VehicleId) = default;
};

inline constexpr VehicleId kDummyVehicle{0};
// Addressee of vehicle-to-base uploads and sender of the broadcast.
inline constexpr VehicleId kBaseStation{-1};

inline std::ostream& operator<<(std::ostream& os, VehicleId id) {
  return os << id.value;
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of a cost function.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid scenario, grid, or graph construction parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A participant would have to reveal its value (fewer than two shares).
class PrivacyPreconditionError : public Error {
 public:
  using Error::Error;
};

// A value does not fit the 32-bit signed wire integer.
class EncodingError : public Error {
 public:
  using Error::Error;
};

// Malformed protocol payloads: length mismatches, misrouted messages.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// The base station is missing at least one participant's aggregate.
class IncompleteRoundError : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

// The iterative baseline's convexity requirements do not hold.
class BaselineInapplicableError : public Error {
 public:
  using Error::Error;
};

}  // namespace csas

template <>
struct std::hash<csas::VehicleId> {
  std::size_t operator()(csas::VehicleId id) const noexcept {
    return std::hash<std::int32_t>{}(id.value);
  }
};
