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

// One batch round of privacy-preserving speed advisory.
//
// Every participant masks its cost table with g(x) = a x + b, splits each
// entry into outdegree + 1 additive shares, keeps one and sends one to each
// out-neighbour. Participants add what they kept to what they received and
// upload the sums; the base station adds the uploads pointwise and
// broadcasts the grid speed with the smallest total.
//
// Shares are exact integers in fixed-point units, so the base-station curve
// equals the sum of the masked tables bit for bit.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "csas/common.hpp"
#include "csas/emissions.hpp"
#include "csas/fixed_point.hpp"
#include "csas/fleet.hpp"
#include "csas/graph.hpp"

namespace csas {

inline constexpr std::int64_t kDefaultShareBound = 100'000'000;

struct MaskingParams {
  double a = 1.0;
  double b = 0.0;

  /// Throws ConfigError unless a > 0 (and both finite).
  void validate() const;
};

/// round_half_away((a * value + b) * 1000).
FixedPoint mask(double value, const MaskingParams& params);

// Source of the random shares. Implementations return an integer uniformly
// distributed on [-bound, bound].
class ShareSampler {
 public:
  virtual ~ShareSampler() = default;
  virtual std::int64_t draw(std::int64_t bound) = 0;
};

class SeededShareSampler final : public ShareSampler {
 public:
  explicit SeededShareSampler(std::uint64_t seed) : engine_(seed) {}
  /// Independent stream per (scenario seed, round).
  static SeededShareSampler for_round(std::uint64_t seed, std::size_t round);

  std::int64_t draw(std::int64_t bound) override;

 private:
  std::mt19937_64 engine_;
};

/// n_shares - 1 draws on [-bound, bound] followed by the residual, so the
/// shares always sum to `masked` exactly. Throws PrivacyPreconditionError
/// for n_shares < 2 and EncodingError if the residual leaves the wire range.
std::vector<FixedPoint> split_shares(FixedPoint masked, std::size_t n_shares,
                                     ShareSampler& sampler, std::int64_t bound);

// A participant's masked cost per grid point.
struct CostTable {
  VehicleId vehicle;
  FixedVector masked;
};

CostTable make_cost_table(const Vehicle& vehicle, const SpeedGrid& grid,
                          const MaskingParams& params);

struct KeptShares {
  VehicleId vehicle;
  FixedVector shares;
};

struct ShareMessage {
  VehicleId sender;
  VehicleId receiver;
  FixedVector shares;
};

struct PreparedRound {
  KeptShares kept;
  std::vector<ShareMessage> outgoing;  // one per out-neighbour, id order
};

// Splits every entry of `table` into outdegree + 1 shares. Share 0 is kept;
// share h + 1 goes to the h-th out-neighbour, so the last out-neighbour
// receives the residual. Draws are consumed grid point by grid point.
PreparedRound prepare_round(const CostTable& table, const CommGraph& g,
                            ShareSampler& sampler, std::int64_t bound);

PreparedRound prepare_round(const Vehicle& vehicle, const SpeedGrid& grid,
                            const MaskingParams& params, const CommGraph& g,
                            ShareSampler& sampler, std::int64_t bound);

/// The dummy participant keeps an all-zero table and sends nothing.
PreparedRound prepare_dummy(VehicleId dummy, std::size_t m);

struct AggregatedTable {
  VehicleId vehicle;
  FixedVector sums;
};

/// kept + every received share, pointwise. Throws ProtocolError on length
/// mismatches or messages addressed to someone else.
AggregatedTable aggregate_local(const KeptShares& kept,
                                std::span<const ShareMessage> inbox);

/// Pointwise sum of all uploads. `roster` lists every participant expected
/// this round; a missing upload throws IncompleteRoundError.
FixedVector base_station_aggregate(std::span<const AggregatedTable> tables,
                                   std::span<const VehicleId> roster);

struct Recommendation {
  std::size_t index = 0;
  double speed = 0.0;
  FixedVector curve;
};

/// Lowest index among the minima of `curve`. Throws ProtocolError when empty.
std::size_t argmin_index(const FixedVector& curve);

Recommendation select_best(const FixedVector& curve, const SpeedGrid& grid);

/// (curve / 1000 - n b) / a. Evaluation-side only; the base station never
/// holds the masking parameters.
Eigen::VectorXd unmask_aggregate(const FixedVector& curve,
                                 const MaskingParams& params, std::size_t n);

// Wire encoding: M little-endian (int32 speed km/h, int32 value) pairs.
// Speeds are rounded to whole km/h; the receiver maps entries by position and
// rejects a speed field that disagrees with its own grid.
inline constexpr std::size_t kPairBytes = 8;

std::vector<std::uint8_t> encode_pairs(const SpeedGrid& grid,
                                       const FixedVector& values);
FixedVector decode_pairs(std::span<const std::uint8_t> body,
                         const SpeedGrid& grid);

struct WireMessage {
  VehicleId sender;
  VehicleId receiver;
  std::vector<std::uint8_t> body;
};

struct RoundTranscript {
  std::vector<VehicleId> participants;    // graph vertices, id order
  std::vector<PreparedRound> prepared;    // parallel to participants
  std::vector<WireMessage> share_messages;
  std::vector<std::vector<ShareMessage>> inboxes;  // decoded, parallel
  std::vector<AggregatedTable> aggregates;  // as decoded by the base station
  std::vector<WireMessage> uploads;
  WireMessage broadcast;
  Recommendation recommendation;

  const std::vector<ShareMessage>& inbox_of(VehicleId v) const;
  const PreparedRound& prepared_for(VehicleId v) const;
};

// Runs a whole round over explicit cost tables. Every graph vertex must have a
// table except kDummyVehicle, which participates as a zero-cost receiver.
// Uploads from `lost_uploads` are dropped before reaching the base station.
RoundTranscript execute_round(std::span<const CostTable> tables,
                              const CommGraph& g, const SpeedGrid& grid,
                              ShareSampler& sampler, std::int64_t bound,
                              std::span<const VehicleId> lost_uploads = {});

RoundTranscript execute_round(const Fleet& fleet, const CommGraph& g,
                              const SpeedGrid& grid,
                              const MaskingParams& params,
                              ShareSampler& sampler, std::int64_t bound,
                              std::span<const VehicleId> lost_uploads = {});

Recommendation run_round(const Fleet& fleet, const CommGraph& g,
                         const SpeedGrid& grid, const MaskingParams& params,
                         ShareSampler& sampler, std::int64_t bound);

}  // namespace csas
