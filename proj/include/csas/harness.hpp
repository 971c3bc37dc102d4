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

// Scenario configuration and orchestration: fleets, topologies, membership
// changes across rounds, dummy-vehicle fallback, and experiment sweeps.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "csas/baseline.hpp"
#include "csas/fleet.hpp"
#include "csas/graph.hpp"
#include "csas/metrics.hpp"
#include "csas/oracle.hpp"
#include "csas/protocol.hpp"

namespace csas {

struct FleetEntry {
  Vehicle vehicle;
  bool initially_active = true;

  friend bool operator==(const FleetEntry& l, const FleetEntry& r) {
    return l.vehicle.id == r.vehicle.id && l.vehicle.factors == r.vehicle.factors &&
           l.vehicle.label == r.vehicle.label &&
           l.initially_active == r.initially_active;
  }
};

enum class TopologyKind { ring, switching, explicit_edges };

struct TopologySpec {
  TopologyKind kind = TopologyKind::ring;
  std::size_t window = 5;   // switching only
  std::vector<Edge> edges;  // explicit only

  friend bool operator==(const TopologySpec&, const TopologySpec&) = default;
};

struct GridSpec {
  std::size_t m = 100;
  double lo = kDefaultSpeedLo;
  double hi = kDefaultSpeedHi;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// Membership changes take effect at the start of `round`.
struct MembershipEvent {
  std::size_t round = 0;
  std::vector<VehicleId> join;
  std::vector<VehicleId> leave;

  friend bool operator==(const MembershipEvent&, const MembershipEvent&) = default;
};

// Simulated loss of one vehicle-to-base upload.
struct UploadLoss {
  std::size_t round = 0;
  VehicleId vehicle;

  friend bool operator==(const UploadLoss&, const UploadLoss&) = default;
};

struct BaselineSpec {
  bool enabled = false;
  double mu_factor = 0.9;  // mu = mu_factor * mu_upper_bound
  double tol_consensus = 0.01;
  double tol_gradient = 0.01;
  std::size_t max_iter = 10'000;
  std::size_t switching_length = 64;  // graphs generated for switching runs

  friend bool operator==(const BaselineSpec&, const BaselineSpec&) = default;
};

struct ScenarioConfig {
  std::string name = "scenario";
  std::vector<FleetEntry> fleet;
  TopologySpec topology;
  GridSpec grid;
  MaskingParams masking;
  std::int64_t share_bound = kDefaultShareBound;
  std::uint64_t seed = 1;
  std::size_t rounds = 1;
  std::vector<MembershipEvent> events;
  std::vector<UploadLoss> upload_losses;
  double oracle_resolution = kDefaultOracleResolution;
  BaselineSpec baseline;
  std::vector<std::size_t> sweep_m;  // default M values for sweeps

  friend bool operator==(const ScenarioConfig& l, const ScenarioConfig& r) {
    return l.name == r.name && l.fleet == r.fleet && l.topology == r.topology &&
           l.grid == r.grid && l.masking.a == r.masking.a &&
           l.masking.b == r.masking.b && l.share_bound == r.share_bound &&
           l.seed == r.seed && l.rounds == r.rounds && l.events == r.events &&
           l.upload_losses == r.upload_losses &&
           l.oracle_resolution == r.oracle_resolution &&
           l.baseline == r.baseline && l.sweep_m == r.sweep_m;
  }
};

/// Throws ConfigError describing the first problem found.
void validate(const ScenarioConfig& config);

/// JSON scenario text; see docs/scenario-format.md. Throws ConfigError.
ScenarioConfig parse_scenario(std::string_view text);
/// Throws ConfigError if the file cannot be read or parsed.
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Built-in experiment setups: 1 and 2 are the six-vehicle ring with
/// identity and 2x+10 masking, 3 is the 120-vehicle fleet used for M sweeps.
ScenarioConfig builtin_case(int which);

struct RoundReport {
  std::size_t round = 0;
  std::vector<VehicleId> active;
  std::vector<VehicleId> dummy_routed;  // vehicles that shared with the dummy
  bool ok = false;
  std::string failure;

  Recommendation recommendation;
  Eigen::VectorXd true_total;        // F on the grid
  Eigen::VectorXd unmasked;          // curve with the masking inverted
  std::size_t grid_argmin = 0;       // argmin of true_total
  OracleResult oracle;
  double accuracy = 0.0;
  PrivacyReport privacy;
  TrafficReport traffic;
};

struct BaselineComparison {
  std::size_t protocol_rounds = 1;
  double protocol_speed = 0.0;
  double dp_speed = 0.0;
  double oracle_speed = 0.0;
  double mu = 0.0;
  double gap = 0.0;  // |dp_speed - protocol_speed|
  DpResult dp;
};

struct ScenarioReport {
  std::string name;
  Eigen::VectorXd grid;
  std::vector<RoundReport> rounds;
  std::optional<BaselineComparison> baseline;

  bool all_rounds_ok() const;
};

// Runs every round: applies membership events, builds the topology over the
// active vehicles, routes outdegree-0 vehicles through the dummy, executes
// the protocol, and computes metrics. Round failures are recorded and the
// scenario continues. Deterministic for a fixed config.
ScenarioReport run_scenario(const ScenarioConfig& config);

/// Adds the dummy vertex (if absent) and the edge weak -> dummy. Leaves `g`
/// unchanged, with a warning on stderr, if `weak` already has an out-neighbour.
CommGraph attach_dummy_vehicle(const CommGraph& g, VehicleId weak);

struct AccuracyRow {
  std::size_t m = 0;
  std::size_t index = 0;
  double speed = 0.0;
  double accuracy = 0.0;
};

/// First-round recommendation and accuracy for each M, all measured against
/// one oracle result for the initial fleet.
std::vector<AccuracyRow> sweep_m(const ScenarioConfig& base,
                                 std::span<const std::size_t> m_values);

/// Protocol (one round) versus the iterative baseline on the initial fleet and
/// topology. Throws BaselineInapplicableError for non-convex fleets.
BaselineComparison compare_baseline(const ScenarioConfig& config);

/// Vehicles active at round 0, ascending id.
Fleet initial_fleet(const ScenarioConfig& config);

}  // namespace csas
