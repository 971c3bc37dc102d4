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

#include "csas/harness.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

namespace csas {

namespace {

using nlohmann::json;

std::string id_str(VehicleId v) { return std::to_string(v.value); }

// Rejects keys outside `allowed` so typos surface as configuration errors.
void check_keys(const json& obj, std::string_view where,
                std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) {
    throw ConfigError(std::string(where) + " must be an object");
  }
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw ConfigError("unknown key '" + item.key() + "' in " +
                        std::string(where));
    }
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : it->template get<T>();
}

std::vector<VehicleId> parse_ids(const json& arr) {
  std::vector<VehicleId> out;
  for (const auto& v : arr) out.push_back(VehicleId{v.get<std::int32_t>()});
  return out;
}

EmissionFactors parse_factors(const json& obj) {
  check_keys(obj, "factors", {"a", "b", "c", "d", "e", "f", "g", "k"});
  return EmissionFactors::from(get_or(obj, "a", 0.0), get_or(obj, "b", 0.0),
                               get_or(obj, "c", 0.0), get_or(obj, "d", 0.0),
                               get_or(obj, "e", 0.0), get_or(obj, "f", 0.0),
                               get_or(obj, "g", 0.0), get_or(obj, "k", 1.0));
}

std::vector<FleetEntry> parse_fleet(const json& arr) {
  if (!arr.is_array()) throw ConfigError("fleet must be an array");
  std::vector<FleetEntry> out;
  std::int32_t next_id = 1;
  for (const auto& e : arr) {
    check_keys(e, "fleet entry", {"id", "class", "factors", "count", "active"});
    if (e.contains("class") == e.contains("factors")) {
      throw ConfigError("fleet entry needs exactly one of 'class' or 'factors'");
    }
    Vehicle proto;
    if (e.contains("class")) {
      const auto vc = parse_vehicle_class(e["class"].get<std::string>());
      proto.factors = factors_for(vc);
      proto.label = std::string(to_string(vc));
    } else {
      proto.factors = parse_factors(e["factors"]);
      proto.label = "custom";
    }
    const bool active = get_or(e, "active", true);
    if (e.contains("count")) {
      if (e.contains("id")) {
        throw ConfigError("fleet entry cannot have both 'id' and 'count'");
      }
      const auto count = e["count"].get<std::size_t>();
      for (std::size_t i = 0; i < count; ++i) {
        proto.id = VehicleId{next_id++};
        out.push_back({proto, active});
      }
    } else {
      if (!e.contains("id")) {
        throw ConfigError("fleet entry needs 'id' or 'count'");
      }
      proto.id = VehicleId{e["id"].get<std::int32_t>()};
      next_id = std::max(next_id, proto.id.value + 1);
      out.push_back({proto, active});
    }
  }
  return out;
}

std::vector<std::size_t> default_m_sweep() {
  std::vector<std::size_t> out;
  for (std::size_t m = 10; m <= 100; m += 10) out.push_back(m);
  return out;
}

}  // namespace

void validate(const ScenarioConfig& config) {
  if (config.fleet.empty()) throw ConfigError("fleet is empty");
  std::set<VehicleId> roster;
  for (const auto& e : config.fleet) {
    if (e.vehicle.id.value < 1) {
      throw ConfigError("vehicle ids must be >= 1 (got " +
                        id_str(e.vehicle.id) + ")");
    }
    if (!roster.insert(e.vehicle.id).second) {
      throw ConfigError("duplicate vehicle id " + id_str(e.vehicle.id));
    }
  }
  config.masking.validate();
  build_speed_grid(config.grid.m, config.grid.lo, config.grid.hi);
  if (config.share_bound < 0 || config.share_bound > kWireMax) {
    throw ConfigError("share_bound must lie in [0, 2^31 - 1]");
  }
  if (config.rounds < 1) throw ConfigError("rounds must be >= 1");
  if (!(config.oracle_resolution > 0.0)) {
    throw ConfigError("oracle_resolution must be positive");
  }
  if (config.topology.kind == TopologyKind::switching &&
      config.topology.window < 1) {
    throw ConfigError("switching window must be >= 1");
  }
  if (config.topology.kind == TopologyKind::explicit_edges) {
    CommGraph({roster.begin(), roster.end()}, config.topology.edges);
  }

  std::set<VehicleId> active;
  for (const auto& e : config.fleet) {
    if (e.initially_active) active.insert(e.vehicle.id);
  }
  auto events = config.events;
  std::stable_sort(events.begin(), events.end(),
                   [](const auto& l, const auto& r) { return l.round < r.round; });
  for (const auto& ev : events) {
    if (ev.round >= config.rounds) {
      throw ConfigError("membership event at round " +
                        std::to_string(ev.round) + " is past the last round");
    }
    for (VehicleId v : ev.leave) {
      if (!active.erase(v)) {
        throw ConfigError("vehicle " + id_str(v) + " leaves at round " +
                          std::to_string(ev.round) + " but is not active");
      }
    }
    for (VehicleId v : ev.join) {
      if (!roster.contains(v)) {
        throw ConfigError("vehicle " + id_str(v) + " joins but is not in the fleet");
      }
      if (!active.insert(v).second) {
        throw ConfigError("vehicle " + id_str(v) + " joins at round " +
                          std::to_string(ev.round) + " but is already active");
      }
    }
  }
  for (const auto& loss : config.upload_losses) {
    if (!roster.contains(loss.vehicle)) {
      throw ConfigError("upload loss names unknown vehicle " +
                        id_str(loss.vehicle));
    }
  }
  const auto& b = config.baseline;
  if (!(b.mu_factor > 0.0 && b.mu_factor < 1.0)) {
    throw ConfigError("baseline mu_factor must lie in (0, 1)");
  }
  if (!(b.tol_consensus > 0.0) || !(b.tol_gradient > 0.0)) {
    throw ConfigError("baseline tolerances must be positive");
  }
  if (b.switching_length < 1) {
    throw ConfigError("baseline switching_length must be >= 1");
  }
  for (std::size_t m : config.sweep_m) {
    if (m < 2) throw ConfigError("sweep_m values must be >= 2");
  }
}

ScenarioConfig parse_scenario(std::string_view text) {
  ScenarioConfig cfg;
  try {
    const json doc = json::parse(text);
    check_keys(doc, "scenario",
               {"name", "fleet", "topology", "grid", "masking", "share_bound",
                "seed", "rounds", "events", "upload_losses",
                "oracle_resolution", "baseline", "sweep_m"});
    cfg.name = get_or<std::string>(doc, "name", cfg.name);
    if (!doc.contains("fleet")) throw ConfigError("scenario has no fleet");
    cfg.fleet = parse_fleet(doc["fleet"]);

    if (doc.contains("topology")) {
      const auto& t = doc["topology"];
      check_keys(t, "topology", {"kind", "window", "edges"});
      const auto kind = get_or<std::string>(t, "kind", "ring");
      if (kind == "ring") {
        cfg.topology.kind = TopologyKind::ring;
      } else if (kind == "switching") {
        cfg.topology.kind = TopologyKind::switching;
        cfg.topology.window = get_or<std::size_t>(t, "window", cfg.topology.window);
      } else if (kind == "explicit") {
        cfg.topology.kind = TopologyKind::explicit_edges;
        for (const auto& e : t.at("edges")) {
          if (!e.is_array() || e.size() != 2) {
            throw ConfigError("explicit edges must be [from, to] pairs");
          }
          cfg.topology.edges.push_back(
              {VehicleId{e[0].get<std::int32_t>()}, VehicleId{e[1].get<std::int32_t>()}});
        }
      } else {
        throw ConfigError("unknown topology kind '" + kind + "'");
      }
    }
    if (doc.contains("grid")) {
      const auto& g = doc["grid"];
      check_keys(g, "grid", {"m", "lo", "hi"});
      cfg.grid.m = get_or<std::size_t>(g, "m", cfg.grid.m);
      cfg.grid.lo = get_or<double>(g, "lo", cfg.grid.lo);
      cfg.grid.hi = get_or<double>(g, "hi", cfg.grid.hi);
    }
    if (doc.contains("masking")) {
      const auto& m = doc["masking"];
      check_keys(m, "masking", {"a", "b"});
      cfg.masking.a = get_or<double>(m, "a", cfg.masking.a);
      cfg.masking.b = get_or<double>(m, "b", cfg.masking.b);
    }
    cfg.share_bound = get_or<std::int64_t>(doc, "share_bound", cfg.share_bound);
    cfg.seed = get_or<std::uint64_t>(doc, "seed", cfg.seed);
    cfg.rounds = get_or<std::size_t>(doc, "rounds", cfg.rounds);
    if (doc.contains("events")) {
      for (const auto& e : doc["events"]) {
        check_keys(e, "event", {"round", "join", "leave"});
        MembershipEvent ev;
        ev.round = e.at("round").get<std::size_t>();
        if (e.contains("join")) ev.join = parse_ids(e["join"]);
        if (e.contains("leave")) ev.leave = parse_ids(e["leave"]);
        cfg.events.push_back(std::move(ev));
      }
    }
    if (doc.contains("upload_losses")) {
      for (const auto& e : doc["upload_losses"]) {
        check_keys(e, "upload loss", {"round", "vehicle"});
        cfg.upload_losses.push_back({e.at("round").get<std::size_t>(),
                                     VehicleId{e.at("vehicle").get<std::int32_t>()}});
      }
    }
    cfg.oracle_resolution =
        get_or<double>(doc, "oracle_resolution", cfg.oracle_resolution);
    if (doc.contains("baseline")) {
      const auto& b = doc["baseline"];
      check_keys(b, "baseline",
                 {"enabled", "mu_factor", "tol_consensus", "tol_gradient",
                  "max_iter", "switching_length"});
      auto& spec = cfg.baseline;
      spec.enabled = get_or(b, "enabled", spec.enabled);
      spec.mu_factor = get_or(b, "mu_factor", spec.mu_factor);
      spec.tol_consensus = get_or(b, "tol_consensus", spec.tol_consensus);
      spec.tol_gradient = get_or(b, "tol_gradient", spec.tol_gradient);
      spec.max_iter = get_or(b, "max_iter", spec.max_iter);
      spec.switching_length = get_or(b, "switching_length", spec.switching_length);
    }
    if (doc.contains("sweep_m")) {
      cfg.sweep_m = doc["sweep_m"].get<std::vector<std::size_t>>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed scenario: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

ScenarioConfig builtin_case(int which) {
  ScenarioConfig cfg;
  switch (which) {
    case 1:
    case 2:
      cfg.name = which == 1 ? "case1" : "case2";
      for (auto& v : one_per_class()) cfg.fleet.push_back({std::move(v), true});
      cfg.masking = which == 1 ? MaskingParams{1.0, 0.0} : MaskingParams{2.0, 10.0};
      break;
    case 3:
      cfg.name = "case3";
      for (auto& v : uniform_fleet(20)) cfg.fleet.push_back({std::move(v), true});
      cfg.masking = {2.0, 10.0};
      cfg.sweep_m = default_m_sweep();
      break;
    default:
      throw ConfigError("there are three built-in cases (1, 2, 3)");
  }
  return cfg;
}

bool ScenarioReport::all_rounds_ok() const {
  return std::all_of(rounds.begin(), rounds.end(),
                     [](const RoundReport& r) { return r.ok; });
}

CommGraph attach_dummy_vehicle(const CommGraph& g, VehicleId weak) {
  if (outdegree(g, weak) >= 1) {
    std::cerr << "warning: vehicle " << weak.value
              << " already has an out-neighbour; dummy not attached\n";
    return g;
  }
  const CommGraph with_dummy =
      g.contains(kDummyVehicle) ? g : g.with_vertex(kDummyVehicle);
  return with_dummy.with_edge({weak, kDummyVehicle});
}

Fleet initial_fleet(const ScenarioConfig& config) {
  Fleet fleet;
  for (const auto& e : config.fleet) {
    if (e.initially_active) fleet.push_back(e.vehicle);
  }
  std::sort(fleet.begin(), fleet.end(),
            [](const Vehicle& l, const Vehicle& r) { return l.id < r.id; });
  return fleet;
}

namespace {

// Tracks the switching sequence for the current membership; a change of
// membership starts a fresh sequence.
struct SwitchingState {
  std::vector<VehicleId> members;
  std::size_t start = 0;
  GraphSequence seq;
};

std::uint64_t derive_seed(std::uint64_t seed, std::size_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(salt), 0x5eedu};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return (std::uint64_t{words[1]} << 32) | words[0];
}

CommGraph topology_for_round(const ScenarioConfig& config,
                             const std::vector<VehicleId>& ids,
                             std::size_t round, SwitchingState& sw) {
  if (ids.size() == 1) return CommGraph(ids, {});
  switch (config.topology.kind) {
    case TopologyKind::ring:
      return ring_topology(ids);
    case TopologyKind::switching:
      if (sw.members != ids || sw.seq.size() == 0) {
        sw.members = ids;
        sw.start = round;
        sw.seq = generate_switching_sequence(ids.size(), config.rounds - round,
                                             config.topology.window,
                                             derive_seed(config.seed, round));
      }
      return relabel(sw.seq.at(round - sw.start), ids);
    case TopologyKind::explicit_edges: {
      std::vector<VehicleId> roster;
      for (const auto& e : config.fleet) roster.push_back(e.vehicle.id);
      return induced_subgraph(CommGraph(roster, config.topology.edges), ids);
    }
  }
  throw ConfigError("unknown topology kind");
}

std::size_t argmin_real(const Eigen::VectorXd& v) {
  Eigen::Index best = 0;
  for (Eigen::Index j = 1; j < v.size(); ++j) {
    if (v[j] < v[best]) best = j;
  }
  return static_cast<std::size_t>(best);
}

GraphSequence baseline_graphs(const ScenarioConfig& config, const Fleet& fleet) {
  std::vector<VehicleId> ids;
  for (const auto& v : fleet) ids.push_back(v.id);
  if (ids.size() == 1) return constant_sequence(CommGraph(ids, {}));
  switch (config.topology.kind) {
    case TopologyKind::ring:
      return constant_sequence(ring_topology(ids));
    case TopologyKind::switching: {
      auto seq = generate_switching_sequence(
          ids.size(), config.baseline.switching_length, config.topology.window,
          derive_seed(config.seed, 0));
      for (auto& g : seq.graphs) g = relabel(g, ids);
      return seq;
    }
    case TopologyKind::explicit_edges: {
      std::vector<VehicleId> roster;
      for (const auto& e : config.fleet) roster.push_back(e.vehicle.id);
      return constant_sequence(
          induced_subgraph(CommGraph(roster, config.topology.edges), ids));
    }
  }
  throw ConfigError("unknown topology kind");
}

}  // namespace

ScenarioReport run_scenario(const ScenarioConfig& config) {
  validate(config);
  const SpeedGrid grid =
      build_speed_grid(config.grid.m, config.grid.lo, config.grid.hi);

  std::map<VehicleId, Vehicle> roster;
  std::set<VehicleId> active;
  for (const auto& e : config.fleet) {
    roster.emplace(e.vehicle.id, e.vehicle);
    if (e.initially_active) active.insert(e.vehicle.id);
  }

  ScenarioReport report;
  report.name = config.name;
  report.grid = grid.speeds();
  SwitchingState switching;

  for (std::size_t r = 0; r < config.rounds; ++r) {
    for (const auto& ev : config.events) {
      if (ev.round != r) continue;
      for (VehicleId v : ev.leave) active.erase(v);
      for (VehicleId v : ev.join) active.insert(v);
    }

    RoundReport rr;
    rr.round = r;
    rr.active.assign(active.begin(), active.end());
    if (rr.active.empty()) {
      rr.failure = "no active vehicles";
      report.rounds.push_back(std::move(rr));
      continue;
    }

    Fleet fleet;
    for (VehicleId v : rr.active) fleet.push_back(roster.at(v));

    try {
      CommGraph g = topology_for_round(config, rr.active, r, switching);
      rr.dummy_routed = validate_privacy_precondition(g);
      for (VehicleId weak : rr.dummy_routed) g = attach_dummy_vehicle(g, weak);

      std::vector<CostTable> tables;
      for (const auto& v : fleet) {
        tables.push_back(make_cost_table(v, grid, config.masking));
      }
      std::vector<VehicleId> lost;
      for (const auto& loss : config.upload_losses) {
        if (loss.round == r) lost.push_back(loss.vehicle);
      }

      auto sampler = SeededShareSampler::for_round(config.seed, r);
      const RoundTranscript tr =
          execute_round(tables, g, grid, sampler, config.share_bound, lost);

      rr.recommendation = tr.recommendation;
      rr.true_total = total_cost(fleet, grid.speeds());
      rr.unmasked =
          unmask_aggregate(tr.recommendation.curve, config.masking, fleet.size());
      rr.grid_argmin = argmin_real(rr.true_total);
      rr.oracle = brute_force_optimum(fleet, grid.lo(), grid.hi(),
                                      config.oracle_resolution);
      rr.accuracy = accuracy(rr.recommendation.speed, fleet, rr.oracle);
      // The base station sees a*F + n*b; deviation is measured against that.
      const Eigen::VectorXd masked_total =
          (config.masking.a * rr.true_total).array() +
          static_cast<double>(fleet.size()) * config.masking.b;
      rr.privacy = privacy_report(tr, tables, masked_total);
      rr.traffic = traffic_report(tr);
      rr.ok = true;
    } catch (const Error& e) {
      rr.failure = e.what();
    }
    report.rounds.push_back(std::move(rr));
  }

  if (config.baseline.enabled) report.baseline = compare_baseline(config);
  return report;
}

std::vector<AccuracyRow> sweep_m(const ScenarioConfig& base,
                                 std::span<const std::size_t> m_values) {
  if (m_values.empty()) throw ConfigError("sweep needs at least one M value");
  validate(base);
  const Fleet fleet = initial_fleet(base);
  if (fleet.empty()) throw ConfigError("no vehicle is active at round 0");
  const OracleResult oracle = brute_force_optimum(
      fleet, base.grid.lo, base.grid.hi, base.oracle_resolution);

  std::vector<AccuracyRow> rows;
  for (std::size_t m : m_values) {
    ScenarioConfig cfg = base;
    cfg.grid.m = m;
    cfg.rounds = 1;
    cfg.events.clear();
    cfg.baseline.enabled = false;
    const auto report = run_scenario(cfg);
    const RoundReport& first = report.rounds.front();
    if (!first.ok) {
      throw ProtocolError("sweep at M=" + std::to_string(m) +
                          " failed: " + first.failure);
    }
    rows.push_back({m, first.recommendation.index, first.recommendation.speed,
                    accuracy(first.recommendation.speed, fleet, oracle)});
  }
  return rows;
}

BaselineComparison compare_baseline(const ScenarioConfig& config) {
  validate(config);
  const Fleet fleet = initial_fleet(config);
  if (fleet.empty()) throw ConfigError("no vehicle is active at round 0");
  const SpeedGrid grid =
      build_speed_grid(config.grid.m, config.grid.lo, config.grid.hi);

  ScenarioConfig one = config;
  one.rounds = 1;
  one.events.clear();
  one.upload_losses.clear();
  one.baseline.enabled = false;
  const auto protocol = run_scenario(one);
  const RoundReport& first = protocol.rounds.front();
  if (!first.ok) {
    throw ProtocolError("protocol round failed: " + first.failure);
  }

  BaselineComparison out;
  out.protocol_rounds = 1;
  out.protocol_speed = first.recommendation.speed;
  out.oracle_speed = first.oracle.s_star;
  out.mu = config.baseline.mu_factor * mu_upper_bound(fleet, grid.lo(), grid.hi());

  DpConfig dp;
  dp.mu = out.mu;
  dp.tol_consensus = config.baseline.tol_consensus;
  dp.tol_gradient = config.baseline.tol_gradient;
  dp.max_iter = config.baseline.max_iter;
  dp.lo = grid.lo();
  dp.hi = grid.hi();
  out.dp = run_dp(fleet, baseline_graphs(config, fleet), dp,
                  individual_optima(fleet, grid.speeds()));
  out.dp_speed = out.dp.consensus_speed();
  out.gap = std::abs(out.dp_speed - out.protocol_speed);
  return out;
}

}  // namespace csas
