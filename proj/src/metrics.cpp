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

#include "csas/metrics.hpp"

#include <string>

namespace csas {

Eigen::VectorXd local_estimated_error(
    const KeptShares& kept, std::span<const ShareMessage> inbox,
    const std::map<VehicleId, FixedVector>& true_masked) {
  const Eigen::Index m = kept.shares.size();
  FixedVector diff = FixedVector::Zero(m);
  for (const ShareMessage& msg : inbox) {
    if (msg.shares.size() != m) {
      throw ProtocolError("inbox message has a different grid length");
    }
    diff += msg.shares;
    if (msg.sender == kDummyVehicle) continue;
    auto it = true_masked.find(msg.sender);
    if (it == true_masked.end()) {
      throw ProtocolError("no ground truth for sender " +
                          std::to_string(msg.sender.value));
    }
    diff -= it->second;
  }
  return to_real(diff);
}

Eigen::VectorXd base_station_deviation(const FixedVector& curve,
                                       const Eigen::VectorXd& true_total) {
  if (curve.size() != true_total.size()) {
    throw ProtocolError("curve and ground truth lengths differ");
  }
  return to_real(curve) - true_total;
}

PrivacyReport privacy_report(const RoundTranscript& round,
                             std::span<const CostTable> tables,
                             const Eigen::VectorXd& true_total) {
  std::map<VehicleId, FixedVector> truth;
  for (const auto& t : tables) truth.emplace(t.vehicle, t.masked);

  PrivacyReport out;
  for (std::size_t i = 0; i < round.participants.size(); ++i) {
    const VehicleId v = round.participants[i];
    if (v == kDummyVehicle) continue;
    out.vehicles.push_back(v);
    out.local_error.push_back(
        local_estimated_error(round.prepared[i].kept, round.inboxes[i], truth));
  }
  out.base_deviation =
      base_station_deviation(round.recommendation.curve, true_total);
  return out;
}

TrafficReport traffic_report(const RoundTranscript& round) {
  TrafficReport out;
  for (const auto& msg : round.share_messages) {
    out.share_message_bytes.push_back(message_bytes(msg));
    out.v2v_bytes += message_bytes(msg);
  }
  for (const auto& msg : round.uploads) {
    out.upload_bytes.push_back(message_bytes(msg));
    out.v2b_bytes += message_bytes(msg);
  }
  out.broadcast_bytes = message_bytes(round.broadcast);
  return out;
}

}  // namespace csas
