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

#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

namespace csas {
namespace {

using testing::ScriptedSampler;

VehicleId V(int i) { return VehicleId{i}; }

FixedVector fixed(std::initializer_list<std::int64_t> xs) {
  FixedVector out(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index j = 0;
  for (auto x : xs) out[j++] = x;
  return out;
}

std::vector<CostTable> case1_tables(const SpeedGrid& grid,
                                    const MaskingParams& params) {
  std::vector<CostTable> out;
  for (const auto& v : one_per_class()) out.push_back(make_cost_table(v, grid, params));
  return out;
}

TEST(Mask, Identity) {
  EXPECT_EQ(mask(100.0, {}).raw(), 100000);
}

TEST(Mask, AffineExample) {
  EXPECT_EQ(mask(100.0, {2.0, 10.0}).raw(), 210000);
}

TEST(Mask, RejectsNonPositiveMultiplier) {
  EXPECT_THROW(mask(1.0, {0.0, 1.0}), ConfigError);
  EXPECT_THROW(mask(1.0, {-1.0, 0.0}), ConfigError);
}

TEST(Mask, RoundsToThreeDecimals) {
  EXPECT_EQ(mask(1.0004, {}).raw(), 1000);
  EXPECT_EQ(mask(1.0005, {}).raw(), 1001);
  EXPECT_EQ(mask(-1.0005, {}).raw(), -1001);
}

TEST(Mask, OutOfWireRangeThrows) {
  EXPECT_THROW(mask(3.0e6, {}), EncodingError);
}

TEST(MaskProperty, PreservesStrictOrderForPositiveMultiplier) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> val(0.0, 1000.0);
  std::uniform_real_distribution<double> a(0.01, 10.0);
  std::uniform_real_distribution<double> b(-100.0, 100.0);
  for (int t = 0; t < 10000; ++t) {
    double x = val(rng), y = val(rng);
    if (x > y) std::swap(x, y);
    const MaskingParams p{a(rng), b(rng)};
    // Order survives whenever the gap exceeds one quantum.
    if (p.a * (y - x) > 1e-3) {
      ASSERT_LT(mask(x, p), mask(y, p));
    }
    ASSERT_LE(mask(x, p), mask(y, p));
  }
}

TEST(SplitShares, ScriptedTwoWay) {
  ScriptedSampler s({20000});
  const auto shares = split_shares(FixedPoint::from_raw(200000), 2, s, 1000000);
  ASSERT_EQ(shares.size(), 2u);
  EXPECT_EQ(shares[0].raw(), 20000);
  EXPECT_EQ(shares[1].raw(), 180000);
}

TEST(SplitShares, ZeroValue) {
  SeededShareSampler s(3);
  const auto shares = split_shares(FixedPoint::from_raw(0), 3, s, 1000);
  std::int64_t sum = 0;
  for (auto x : shares) sum += x.raw();
  EXPECT_EQ(sum, 0);
}

TEST(SplitShares, TooFewSharesIsPrivacyError) {
  SeededShareSampler s(3);
  EXPECT_THROW(split_shares(FixedPoint::from_raw(5), 1, s, 1000),
               PrivacyPreconditionError);
  EXPECT_THROW(split_shares(FixedPoint::from_raw(5), 0, s, 1000),
               PrivacyPreconditionError);
}

TEST(SplitShares, BoundOutsideRangeIsConfigError) {
  SeededShareSampler s(3);
  EXPECT_THROW(split_shares(FixedPoint::from_raw(5), 2, s, -1), ConfigError);
  EXPECT_THROW(split_shares(FixedPoint::from_raw(5), 2, s, kWireMax + 1),
               ConfigError);
}

TEST(SplitShares, ZeroBoundSendsEverything) {
  SeededShareSampler s(3);
  const auto shares = split_shares(FixedPoint::from_raw(777), 2, s, 0);
  EXPECT_EQ(shares[0].raw(), 0);
  EXPECT_EQ(shares[1].raw(), 777);
}

TEST(SplitSharesProperty, ReconstructsExactly) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::int64_t> value(-1'000'000'000, 1'000'000'000);
  std::uniform_int_distribution<std::size_t> count(2, 12);
  SeededShareSampler s(1234);
  int failures = 0;
  for (int t = 0; t < 10000; ++t) {
    const auto v = value(rng);
    const auto n = count(rng);
    const auto shares = split_shares(FixedPoint::from_raw(v), n, s, kDefaultShareBound);
    std::int64_t sum = 0;
    for (auto x : shares) sum += x.raw();
    failures += (sum != v) || (shares.size() != n);
  }
  EXPECT_EQ(failures, 0);
}

TEST(SplitSharesProperty, NonResidualSharesStayInBound) {
  SeededShareSampler s(8);
  for (int t = 0; t < 1000; ++t) {
    const auto shares = split_shares(FixedPoint::from_raw(123456), 5, s, 5000);
    for (std::size_t h = 0; h + 1 < shares.size(); ++h) {
      ASSERT_LE(std::abs(shares[h].raw()), 5000);
    }
  }
}

// With the bound far above the value, the kept share at a fixed grid point
// should range over nearly the whole support regardless of the value.
TEST(SplitSharesProperty, KeptShareSpansSupport) {
  const std::int64_t value = 140000;
  const std::int64_t bound = 10 * value;
  std::int64_t lo = bound, hi = -bound;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    SeededShareSampler s(seed);
    const auto shares = split_shares(FixedPoint::from_raw(value), 2, s, bound);
    lo = std::min(lo, shares[0].raw());
    hi = std::max(hi, shares[0].raw());
  }
  EXPECT_GE(static_cast<double>(hi - lo), 0.95 * static_cast<double>(2 * bound));
}

TEST(SeededShareSampler, DeterministicPerRound) {
  auto a = SeededShareSampler::for_round(5, 2);
  auto b = SeededShareSampler::for_round(5, 2);
  auto c = SeededShareSampler::for_round(5, 3);
  bool differs = false;
  for (int i = 0; i < 50; ++i) {
    const auto x = a.draw(1000000);
    EXPECT_EQ(x, b.draw(1000000));
    differs |= (x != c.draw(1000000));
  }
  EXPECT_TRUE(differs);
}

TEST(PrepareRound, RingSendsOneMessage) {
  const auto grid = build_speed_grid(5, 5, 140);
  const auto tables = case1_tables(grid, {});
  SeededShareSampler s(1);
  const auto prep = prepare_round(tables[0], ring_topology(6), s, kDefaultShareBound);
  ASSERT_EQ(prep.outgoing.size(), 1u);
  EXPECT_EQ(prep.outgoing[0].receiver, V(2));
  EXPECT_EQ(prep.kept.shares + prep.outgoing[0].shares, tables[0].masked);
}

TEST(PrepareRound, CompleteGraphSendsToAllOthers) {
  std::vector<Edge> es;
  for (int u = 1; u <= 4; ++u)
    for (int w = 1; w <= 4; ++w)
      if (u != w) es.push_back({V(u), V(w)});
  const CommGraph g({V(1), V(2), V(3), V(4)}, es);
  const auto grid = build_speed_grid(7, 5, 140);
  const Vehicle veh{V(1), factors_for(VehicleClass::R005), "R005"};
  SeededShareSampler s(2);
  const auto prep = prepare_round(veh, grid, {}, g, s, kDefaultShareBound);
  ASSERT_EQ(prep.outgoing.size(), 3u);
  FixedVector sum = prep.kept.shares;
  for (const auto& m : prep.outgoing) sum += m.shares;
  EXPECT_EQ(sum, make_cost_table(veh, grid, {}).masked);
}

TEST(PrepareRound, NoOutNeighbourIsPrivacyError) {
  const CommGraph g({V(1), V(2)}, {{V(2), V(1)}});
  const auto grid = build_speed_grid(3, 5, 140);
  const CostTable t{V(1), FixedVector::Constant(3, 10)};
  SeededShareSampler s(1);
  EXPECT_THROW(prepare_round(t, g, s, 100), PrivacyPreconditionError);
}

TEST(PrepareRound, ZeroBoundKeepsNothing) {
  const auto grid = build_speed_grid(4, 5, 140);
  const auto tables = case1_tables(grid, {});
  SeededShareSampler s(1);
  const auto prep = prepare_round(tables[2], ring_topology(6), s, 0);
  EXPECT_EQ(prep.kept.shares, FixedVector::Zero(4));
  EXPECT_EQ(prep.outgoing[0].shares, tables[2].masked);
}

TEST(AggregateLocal, SumsKeptAndReceived) {
  const KeptShares kept{V(1), fixed({1, 2})};
  const std::vector<ShareMessage> inbox{{V(2), V(1), fixed({10, 20})},
                                        {V(3), V(1), fixed({100, 200})}};
  EXPECT_EQ(aggregate_local(kept, inbox).sums, fixed({111, 222}));
}

TEST(AggregateLocal, EmptyInboxReturnsKept) {
  const KeptShares kept{V(1), fixed({1, 2})};
  EXPECT_EQ(aggregate_local(kept, {}).sums, fixed({1, 2}));
}

TEST(AggregateLocal, RejectsMisaddressedOrMisSized) {
  const KeptShares kept{V(1), fixed({1, 2})};
  const std::vector<ShareMessage> wrong_to{{V(2), V(3), fixed({1, 1})}};
  EXPECT_THROW(aggregate_local(kept, wrong_to), ProtocolError);
  const std::vector<ShareMessage> wrong_len{{V(2), V(1), fixed({1, 1, 1})}};
  EXPECT_THROW(aggregate_local(kept, wrong_len), ProtocolError);
}

TEST(BaseStationAggregate, SumsAllUploads) {
  const std::vector<AggregatedTable> t{{V(1), fixed({1, 2})}, {V(2), fixed({3, 4})}};
  const std::vector<VehicleId> roster{V(1), V(2)};
  EXPECT_EQ(base_station_aggregate(t, roster), fixed({4, 6}));
}

TEST(BaseStationAggregate, MissingUploadIsIncomplete) {
  const std::vector<AggregatedTable> t{{V(1), fixed({1, 2})}};
  const std::vector<VehicleId> roster{V(1), V(2)};
  EXPECT_THROW(base_station_aggregate(t, roster), IncompleteRoundError);
}

TEST(BaseStationAggregate, DuplicateOrExtraIsProtocolError) {
  const std::vector<VehicleId> roster{V(1)};
  const std::vector<AggregatedTable> dup{{V(1), fixed({1})}, {V(1), fixed({1})}};
  EXPECT_THROW(base_station_aggregate(dup, roster), ProtocolError);
  const std::vector<AggregatedTable> extra{{V(1), fixed({1})}, {V(2), fixed({1})}};
  EXPECT_THROW(base_station_aggregate(extra, roster), ProtocolError);
}

TEST(SelectBest, TieGoesToLowestIndex) {
  const auto grid = build_speed_grid(3, 40, 60);
  const auto r = select_best(fixed({7, 3, 3}), grid);
  EXPECT_EQ(r.index, 1u);
  EXPECT_EQ(r.speed, 50.0);
}

TEST(SelectBest, SinglePointAndEmpty) {
  EXPECT_EQ(argmin_index(fixed({-4})), 0u);
  EXPECT_THROW(argmin_index(FixedVector()), ProtocolError);
}

TEST(UnmaskAggregate, InvertsAffineMask) {
  const auto v = unmask_aggregate(fixed({500000, 440000}), {2.0, 0.0}, 2);
  EXPECT_DOUBLE_EQ(v[0], 250.0);
  EXPECT_DOUBLE_EQ(v[1], 220.0);
  const auto w = unmask_aggregate(fixed({260000}), {2.0, 10.0}, 3);
  EXPECT_DOUBLE_EQ(w[0], 115.0);
}

TEST(WireFormat, PairLayoutIsLittleEndian) {
  const auto grid = build_speed_grid(2, 40, 50);
  const auto bytes = encode_pairs(grid, fixed({-1, 258}));
  const std::vector<std::uint8_t> expected{40, 0, 0, 0, 0xFF, 0xFF, 0xFF, 0xFF,
                                           50, 0, 0, 0, 2,    1,    0,    0};
  EXPECT_EQ(bytes, expected);
  EXPECT_EQ(decode_pairs(bytes, grid), fixed({-1, 258}));
}

TEST(WireFormat, NineteenPairsAre152Bytes) {
  const auto grid = build_speed_grid(19, 30, 120);
  EXPECT_EQ(encode_pairs(grid, FixedVector::Zero(19)).size(), 152u);
}

TEST(WireFormat, RejectsBadPayloads) {
  const auto grid = build_speed_grid(2, 40, 50);
  auto bytes = encode_pairs(grid, fixed({1, 2}));
  bytes.pop_back();
  EXPECT_THROW(decode_pairs(bytes, grid), ProtocolError);
  auto shifted = encode_pairs(grid, fixed({1, 2}));
  shifted[0] = 41;
  EXPECT_THROW(decode_pairs(shifted, grid), ProtocolError);
  EXPECT_THROW(encode_pairs(grid, fixed({kWireMax + 1, 0})), EncodingError);
  EXPECT_THROW(encode_pairs(grid, fixed({1})), ProtocolError);
}

TEST(WireFormatProperty, RoundTripsRandomValues) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::int64_t> v(kWireMin, kWireMax);
  const auto grid = build_speed_grid(100, 5, 140);
  for (int t = 0; t < 100; ++t) {
    FixedVector x(100);
    for (Eigen::Index j = 0; j < 100; ++j) x[j] = v(rng);
    EXPECT_EQ(decode_pairs(encode_pairs(grid, x), grid), x);
  }
}

TEST(ExecuteRound, CaseOneMessageCountsAndSizes) {
  const auto grid = build_speed_grid(100, 5, 140);
  auto s = SeededShareSampler::for_round(1, 0);
  const auto tr = execute_round(one_per_class(), ring_topology(6), grid, {}, s,
                                kDefaultShareBound);
  EXPECT_EQ(tr.share_messages.size(), 6u);
  EXPECT_EQ(tr.uploads.size(), 6u);
  for (const auto& m : tr.share_messages) EXPECT_EQ(m.body.size(), 800u);
  for (const auto& m : tr.uploads) {
    EXPECT_EQ(m.body.size(), 800u);
    EXPECT_EQ(m.receiver, kBaseStation);
  }
  EXPECT_EQ(tr.broadcast.body.size(), 8u);
}

TEST(ExecuteRound, CurveIsSumOfMaskedTables) {
  const auto grid = build_speed_grid(100, 5, 140);
  const MaskingParams p{2.0, 10.0};
  const auto tables = case1_tables(grid, p);
  FixedVector expected = FixedVector::Zero(100);
  for (const auto& t : tables) expected += t.masked;
  auto s = SeededShareSampler::for_round(77, 0);
  const auto tr = execute_round(tables, ring_topology(6), grid, s, kDefaultShareBound);
  EXPECT_EQ(tr.recommendation.curve, expected);
}

TEST(ExecuteRound, LostUploadIsIncomplete) {
  const auto grid = build_speed_grid(10, 5, 140);
  auto s = SeededShareSampler::for_round(1, 0);
  const std::vector<VehicleId> lost{V(3)};
  EXPECT_THROW(execute_round(one_per_class(), ring_topology(6), grid, {}, s,
                             kDefaultShareBound, lost),
               IncompleteRoundError);
}

TEST(ExecuteRound, MissingTableOrVertexIsProtocolError) {
  const auto grid = build_speed_grid(10, 5, 140);
  auto fleet = one_per_class();
  auto s = SeededShareSampler::for_round(1, 0);
  fleet.pop_back();
  EXPECT_THROW(execute_round(fleet, ring_topology(6), grid, {}, s, 100),
               ProtocolError);
  EXPECT_THROW(execute_round(one_per_class(), ring_topology(5), grid, {}, s, 100),
               ProtocolError);
}

TEST(ExecuteRound, TwoVehicleRing) {
  const auto grid = build_speed_grid(10, 5, 140);
  const Fleet all = one_per_class();
  const Fleet fleet(all.begin(), all.begin() + 2);
  auto s = SeededShareSampler::for_round(1, 0);
  const auto tr = execute_round(fleet, ring_topology(2), grid, {}, s, kDefaultShareBound);
  EXPECT_EQ(tr.share_messages.size(), 2u);
  const Eigen::VectorXd truth = total_cost(fleet, grid.speeds());
  Eigen::Index j = 0;
  truth.minCoeff(&j);
  EXPECT_EQ(tr.recommendation.index, static_cast<std::size_t>(j));
}

TEST(ExecuteRoundProperty, ArgminInvariantUnderAffineMasking) {
  const auto grid = build_speed_grid(100, 5, 140);
  const auto fleet = one_per_class();
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> a(0.1, 20.0);
  std::uniform_real_distribution<double> b(-500.0, 500.0);
  for (int t = 0; t < 100; ++t) {
    auto s = SeededShareSampler::for_round(static_cast<std::uint64_t>(t), 0);
    const auto rec = run_round(fleet, ring_topology(6), grid, {a(rng), b(rng)}, s,
                               kDefaultShareBound);
    ASSERT_EQ(rec.index, 47u) << "trial " << t;
  }
}

TEST(ExecuteRoundProperty, CurveDoesNotDependOnSeed) {
  const auto grid = build_speed_grid(100, 5, 140);
  auto s0 = SeededShareSampler::for_round(0, 0);
  const auto ref = execute_round(one_per_class(), ring_topology(6), grid, {2, 10},
                                 s0, kDefaultShareBound);
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto s = SeededShareSampler::for_round(seed, 0);
    const auto tr = execute_round(one_per_class(), ring_topology(6), grid, {2, 10},
                                  s, kDefaultShareBound);
    ASSERT_EQ(tr.recommendation.curve, ref.recommendation.curve) << seed;
    EXPECT_NE(tr.share_messages[0].body, ref.share_messages[0].body);
  }
}

TEST(ExecuteRoundProperty, MessageCountIsOutdegreeSum) {
  const auto grid = build_speed_grid(12, 5, 140);
  const auto fleet = uniform_fleet(2);
  const auto seq = generate_switching_sequence(fleet.size(), 20, 1, 17);
  for (const auto& g : seq.graphs) {
    std::size_t deg_sum = 0;
    for (VehicleId v : g.vertices()) deg_sum += outdegree(g, v);
    auto s = SeededShareSampler::for_round(1, 0);
    const auto tr = execute_round(fleet, g, grid, {}, s, kDefaultShareBound);
    EXPECT_EQ(tr.share_messages.size(), deg_sum);
    EXPECT_EQ(tr.uploads.size(), fleet.size());
    EXPECT_EQ(tr.broadcast.body.size(), 8u);
  }
}

TEST(ExecuteRound, DummyVehicleIsNeutral) {
  const auto grid = build_speed_grid(100, 5, 140);
  const auto fleet = one_per_class();
  const auto g = ring_topology(6);
  const auto with_dummy = g.with_vertex(kDummyVehicle)
                              .with_edge({V(6), kDummyVehicle})
                              .with_edge({kDummyVehicle, V(1)});
  auto s1 = SeededShareSampler::for_round(5, 0);
  auto s2 = SeededShareSampler::for_round(5, 0);
  const auto plain = execute_round(fleet, g, grid, {}, s1, kDefaultShareBound);
  const auto routed = execute_round(fleet, with_dummy, grid, {}, s2, kDefaultShareBound);
  EXPECT_EQ(plain.recommendation.curve, routed.recommendation.curve);
  EXPECT_EQ(plain.recommendation.index, routed.recommendation.index);
  EXPECT_TRUE(routed.prepared_for(kDummyVehicle).outgoing.empty());
  EXPECT_EQ(routed.inbox_of(kDummyVehicle).size(), 1u);
}

}  // namespace
}  // namespace csas
