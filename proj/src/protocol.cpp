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

#include "csas/protocol.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>

namespace csas {

namespace {

std::string id_str(VehicleId v) { return std::to_string(v.value); }

std::size_t position_of(const std::vector<VehicleId>& ids, VehicleId v) {
  auto it = std::lower_bound(ids.begin(), ids.end(), v);
  if (it == ids.end() || *it != v) {
    throw ProtocolError("vehicle " + id_str(v) + " is not a participant");
  }
  return static_cast<std::size_t>(it - ids.begin());
}

void put_le32(std::vector<std::uint8_t>& out, std::int32_t value) {
  const auto u = static_cast<std::uint32_t>(value);
  for (int shift = 0; shift < 32; shift += 8) {
    out.push_back(static_cast<std::uint8_t>((u >> shift) & 0xFFu));
  }
}

std::int32_t get_le32(std::span<const std::uint8_t> in, std::size_t offset) {
  std::uint32_t u = 0;
  for (int i = 3; i >= 0; --i) {
    u = (u << 8) | in[offset + static_cast<std::size_t>(i)];
  }
  return static_cast<std::int32_t>(u);
}

std::int32_t wire_speed(double speed) {
  return static_cast<std::int32_t>(std::lround(speed));
}

}  // namespace

void MaskingParams::validate() const {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw ConfigError("masking parameters must be finite");
  }
  if (!(a > 0.0)) {
    throw ConfigError("masking multiplier a must be positive");
  }
}

FixedPoint mask(double value, const MaskingParams& params) {
  params.validate();
  return FixedPoint::from_real(params.a * value + params.b);
}

SeededShareSampler SeededShareSampler::for_round(std::uint64_t seed,
                                                 std::size_t round) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(round),
                    static_cast<std::uint32_t>(std::uint64_t{round} >> 32)};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return SeededShareSampler((std::uint64_t{words[1]} << 32) | words[0]);
}

std::int64_t SeededShareSampler::draw(std::int64_t bound) {
  if (bound == 0) return 0;
  return std::uniform_int_distribution<std::int64_t>(-bound, bound)(engine_);
}

std::vector<FixedPoint> split_shares(FixedPoint masked, std::size_t n_shares,
                                     ShareSampler& sampler,
                                     std::int64_t bound) {
  if (n_shares < 2) {
    throw PrivacyPreconditionError(
        "at least two shares are required to hide a value");
  }
  if (bound < 0 || bound > kWireMax) {
    throw ConfigError("share bound must lie in [0, 2^31 - 1]");
  }
  std::vector<FixedPoint> shares;
  shares.reserve(n_shares);
  std::int64_t residual = masked.raw();
  for (std::size_t h = 0; h + 1 < n_shares; ++h) {
    const std::int64_t r = sampler.draw(bound);
    shares.push_back(FixedPoint::from_raw(r));
    residual -= r;
  }
  shares.push_back(FixedPoint::from_raw(residual));
  return shares;
}

CostTable make_cost_table(const Vehicle& vehicle, const SpeedGrid& grid,
                          const MaskingParams& params) {
  params.validate();
  CostTable table{vehicle.id, FixedVector(grid.speeds().size())};
  for (std::size_t j = 0; j < grid.size(); ++j) {
    table.masked[static_cast<Eigen::Index>(j)] =
        mask(emission_rate(vehicle.factors, grid[j]), params).raw();
  }
  return table;
}

PreparedRound prepare_round(const CostTable& table, const CommGraph& g,
                            ShareSampler& sampler, std::int64_t bound) {
  const auto targets = g.out_neighbors(table.vehicle);
  if (targets.empty()) {
    throw PrivacyPreconditionError("vehicle " + id_str(table.vehicle) +
                                   " has no out-neighbour to share with");
  }
  const Eigen::Index m = table.masked.size();
  PreparedRound out;
  out.kept = {table.vehicle, FixedVector(m)};
  for (VehicleId to : targets) {
    out.outgoing.push_back({table.vehicle, to, FixedVector(m)});
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto shares = split_shares(FixedPoint::from_raw(table.masked[j]),
                                     targets.size() + 1, sampler, bound);
    out.kept.shares[j] = shares[0].raw();
    for (std::size_t h = 0; h < targets.size(); ++h) {
      out.outgoing[h].shares[j] = shares[h + 1].raw();
    }
  }
  return out;
}

PreparedRound prepare_round(const Vehicle& vehicle, const SpeedGrid& grid,
                            const MaskingParams& params, const CommGraph& g,
                            ShareSampler& sampler, std::int64_t bound) {
  return prepare_round(make_cost_table(vehicle, grid, params), g, sampler,
                       bound);
}

PreparedRound prepare_dummy(VehicleId dummy, std::size_t m) {
  return {{dummy, FixedVector::Zero(static_cast<Eigen::Index>(m))}, {}};
}

AggregatedTable aggregate_local(const KeptShares& kept,
                                std::span<const ShareMessage> inbox) {
  AggregatedTable out{kept.vehicle, kept.shares};
  for (const ShareMessage& msg : inbox) {
    if (msg.receiver != kept.vehicle) {
      throw ProtocolError("message from " + id_str(msg.sender) +
                          " is addressed to " + id_str(msg.receiver) +
                          ", not " + id_str(kept.vehicle));
    }
    if (msg.shares.size() != kept.shares.size()) {
      throw ProtocolError("message from " + id_str(msg.sender) +
                          " has a different grid length");
    }
    out.sums += msg.shares;
  }
  return out;
}

FixedVector base_station_aggregate(std::span<const AggregatedTable> tables,
                                   std::span<const VehicleId> roster) {
  std::map<VehicleId, const AggregatedTable*> by_id;
  for (const auto& t : tables) {
    if (!by_id.emplace(t.vehicle, &t).second) {
      throw ProtocolError("duplicate upload from vehicle " + id_str(t.vehicle));
    }
  }
  if (roster.empty()) throw ProtocolError("empty round roster");
  FixedVector curve;
  for (VehicleId v : roster) {
    auto it = by_id.find(v);
    if (it == by_id.end()) {
      throw IncompleteRoundError("no aggregate received from vehicle " +
                                 id_str(v));
    }
    const FixedVector& sums = it->second->sums;
    if (curve.size() == 0) {
      curve = sums;
    } else if (sums.size() != curve.size()) {
      throw ProtocolError("upload from vehicle " + id_str(v) +
                          " has a different grid length");
    } else {
      curve += sums;
    }
    by_id.erase(it);
  }
  if (!by_id.empty()) {
    throw ProtocolError("upload from vehicle " +
                        id_str(by_id.begin()->first) +
                        ", which is not on the roster");
  }
  return curve;
}

std::size_t argmin_index(const FixedVector& curve) {
  if (curve.size() == 0) throw ProtocolError("cannot select from an empty curve");
  Eigen::Index best = 0;
  for (Eigen::Index j = 1; j < curve.size(); ++j) {
    if (curve[j] < curve[best]) best = j;
  }
  return static_cast<std::size_t>(best);
}

Recommendation select_best(const FixedVector& curve, const SpeedGrid& grid) {
  if (static_cast<std::size_t>(curve.size()) != grid.size()) {
    throw ProtocolError("curve length does not match the speed grid");
  }
  const std::size_t j = argmin_index(curve);
  return {j, grid[j], curve};
}

Eigen::VectorXd unmask_aggregate(const FixedVector& curve,
                                 const MaskingParams& params, std::size_t n) {
  if (!(params.a > 0.0)) {
    throw ConfigError("masking multiplier a must be positive");
  }
  return (to_real(curve).array() - static_cast<double>(n) * params.b) /
         params.a;
}

std::vector<std::uint8_t> encode_pairs(const SpeedGrid& grid,
                                       const FixedVector& values) {
  if (static_cast<std::size_t>(values.size()) != grid.size()) {
    throw ProtocolError("payload length does not match the speed grid");
  }
  check_wire_range(values);
  std::vector<std::uint8_t> out;
  out.reserve(grid.size() * kPairBytes);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    put_le32(out, wire_speed(grid[j]));
    put_le32(out, static_cast<std::int32_t>(values[static_cast<Eigen::Index>(j)]));
  }
  return out;
}

FixedVector decode_pairs(std::span<const std::uint8_t> body,
                         const SpeedGrid& grid) {
  if (body.size() != grid.size() * kPairBytes) {
    throw ProtocolError("payload of " + std::to_string(body.size()) +
                        " bytes does not hold " + std::to_string(grid.size()) +
                        " pairs");
  }
  FixedVector out(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const std::int32_t speed = get_le32(body, j * kPairBytes);
    if (speed != wire_speed(grid[j])) {
      throw ProtocolError("pair " + std::to_string(j) + " carries speed " +
                          std::to_string(speed) + " km/h, expected " +
                          std::to_string(wire_speed(grid[j])));
    }
    out[static_cast<Eigen::Index>(j)] = get_le32(body, j * kPairBytes + 4);
  }
  return out;
}

const std::vector<ShareMessage>& RoundTranscript::inbox_of(VehicleId v) const {
  return inboxes.at(position_of(participants, v));
}

const PreparedRound& RoundTranscript::prepared_for(VehicleId v) const {
  return prepared.at(position_of(participants, v));
}

RoundTranscript execute_round(std::span<const CostTable> tables,
                              const CommGraph& g, const SpeedGrid& grid,
                              ShareSampler& sampler, std::int64_t bound,
                              std::span<const VehicleId> lost_uploads) {
  std::map<VehicleId, const CostTable*> by_id;
  for (const auto& t : tables) {
    if (!g.contains(t.vehicle)) {
      throw ProtocolError("vehicle " + id_str(t.vehicle) +
                          " is missing from the communication graph");
    }
    if (t.vehicle == kDummyVehicle) {
      throw ProtocolError("the dummy participant cannot carry a cost table");
    }
    if (static_cast<std::size_t>(t.masked.size()) != grid.size()) {
      throw ProtocolError("cost table of vehicle " + id_str(t.vehicle) +
                          " does not match the speed grid");
    }
    if (!by_id.emplace(t.vehicle, &t).second) {
      throw ProtocolError("duplicate cost table for vehicle " +
                          id_str(t.vehicle));
    }
  }

  RoundTranscript tr;
  tr.participants = g.vertices();
  const std::size_t n = tr.participants.size();

  for (VehicleId v : tr.participants) {
    if (v == kDummyVehicle) {
      tr.prepared.push_back(prepare_dummy(v, grid.size()));
      continue;
    }
    auto it = by_id.find(v);
    if (it == by_id.end()) {
      throw ProtocolError("graph vertex " + id_str(v) + " has no cost table");
    }
    tr.prepared.push_back(prepare_round(*it->second, g, sampler, bound));
  }

  tr.inboxes.resize(n);
  for (const auto& prep : tr.prepared) {
    for (const auto& msg : prep.outgoing) {
      WireMessage wire{msg.sender, msg.receiver, encode_pairs(grid, msg.shares)};
      tr.inboxes[position_of(tr.participants, msg.receiver)].push_back(
          {wire.sender, wire.receiver, decode_pairs(wire.body, grid)});
      tr.share_messages.push_back(std::move(wire));
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    const auto local = aggregate_local(tr.prepared[i].kept, tr.inboxes[i]);
    const VehicleId v = tr.participants[i];
    if (std::find(lost_uploads.begin(), lost_uploads.end(), v) !=
        lost_uploads.end()) {
      continue;
    }
    tr.uploads.push_back({v, kBaseStation, encode_pairs(grid, local.sums)});
  }

  for (const auto& up : tr.uploads) {
    tr.aggregates.push_back({up.sender, decode_pairs(up.body, grid)});
  }
  const FixedVector curve =
      base_station_aggregate(tr.aggregates, tr.participants);
  check_wire_range(curve);
  tr.recommendation = select_best(curve, grid);

  std::vector<std::uint8_t> body;
  put_le32(body, wire_speed(tr.recommendation.speed));
  put_le32(body, static_cast<std::int32_t>(tr.recommendation.index));
  tr.broadcast = {kBaseStation, kBaseStation, std::move(body)};
  return tr;
}

RoundTranscript execute_round(const Fleet& fleet, const CommGraph& g,
                              const SpeedGrid& grid,
                              const MaskingParams& params,
                              ShareSampler& sampler, std::int64_t bound,
                              std::span<const VehicleId> lost_uploads) {
  std::vector<CostTable> tables;
  tables.reserve(fleet.size());
  for (const auto& v : fleet) tables.push_back(make_cost_table(v, grid, params));
  return execute_round(tables, g, grid, sampler, bound, lost_uploads);
}

Recommendation run_round(const Fleet& fleet, const CommGraph& g,
                         const SpeedGrid& grid, const MaskingParams& params,
                         ShareSampler& sampler, std::int64_t bound) {
  return execute_round(fleet, g, grid, params, sampler, bound).recommendation;
}

}  // namespace csas
