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

// Post-hoc measurements over a completed round: what a curious participant
// or the base station could infer, and what went over the air.

#include <Eigen/Dense>

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "csas/fixed_point.hpp"
#include "csas/protocol.hpp"

namespace csas {

// Sum of the shares `kept.vehicle` received, minus the true masked costs of
// their senders, in real units. Nonzero entries mean the receiver's best
// additive guess is wrong. An empty inbox yields a zero curve.
Eigen::VectorXd local_estimated_error(
    const KeptShares& kept, std::span<const ShareMessage> inbox,
    const std::map<VehicleId, FixedVector>& true_masked);

/// curve / 1000 - F, pointwise.
Eigen::VectorXd base_station_deviation(const FixedVector& curve,
                                       const Eigen::VectorXd& true_total);

/// Pair-encoded payload of m entries.
constexpr std::size_t message_bytes(std::size_t m) { return kPairBytes * m; }
inline std::size_t message_bytes(const WireMessage& msg) {
  return msg.body.size();
}

struct PrivacyReport {
  std::vector<VehicleId> vehicles;           // non-dummy participants
  std::vector<Eigen::VectorXd> local_error;  // parallel to vehicles
  Eigen::VectorXd base_deviation;
};

PrivacyReport privacy_report(const RoundTranscript& round,
                             std::span<const CostTable> tables,
                             const Eigen::VectorXd& true_total);

struct TrafficReport {
  std::vector<std::size_t> share_message_bytes;
  std::vector<std::size_t> upload_bytes;
  std::size_t v2v_bytes = 0;
  std::size_t v2b_bytes = 0;
  std::size_t broadcast_bytes = 0;

  std::size_t v2v_messages() const { return share_message_bytes.size(); }
  std::size_t v2b_messages() const { return upload_bytes.size(); }
  std::size_t total_bytes() const {
    return v2v_bytes + v2b_bytes + broadcast_bytes;
  }
};

TrafficReport traffic_report(const RoundTranscript& round);

}  // namespace csas
