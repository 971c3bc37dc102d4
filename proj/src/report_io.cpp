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

#include "csas/report_io.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <fstream>

#include "json.hpp"

namespace csas {

namespace {

std::string join_ids(std::span<const VehicleId> ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(ids[i].value);
  }
  return out;
}

// Quotes a CSV field when it could break the row.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::ofstream open_for_write(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + p.string());
  return out;
}

}  // namespace

void write_aggregate_csv(const ScenarioReport& report, std::ostream& out) {
  out << "round,speed_kmh,base_station_raw,base_station_value,unmasked,"
         "true_total_g_per_km,deviation\n";
  for (const auto& r : report.rounds) {
    if (!r.ok) continue;
    const auto& curve = r.recommendation.curve;
    for (Eigen::Index j = 0; j < curve.size(); ++j) {
      fmt::print(out, "{},{:.6f},{},{:.3f},{:.6f},{:.6f},{:.6f}\n", r.round,
                 report.grid[j], curve[j], static_cast<double>(curve[j]) / kFixedScale,
                 r.unmasked[j], r.true_total[j], r.privacy.base_deviation[j]);
    }
  }
}

void write_local_error_csv(const ScenarioReport& report, std::ostream& out) {
  out << "round,vehicle,speed_kmh,local_error\n";
  for (const auto& r : report.rounds) {
    if (!r.ok) continue;
    for (std::size_t i = 0; i < r.privacy.vehicles.size(); ++i) {
      const auto& err = r.privacy.local_error[i];
      for (Eigen::Index j = 0; j < err.size(); ++j) {
        fmt::print(out, "{},{},{:.6f},{:.3f}\n", r.round,
                   r.privacy.vehicles[i].value, report.grid[j], err[j]);
      }
    }
  }
}

void write_recommendations_csv(const ScenarioReport& report, std::ostream& out) {
  out << "round,ok,active,dummy_routed,index,speed_kmh,grid_argmin_index,"
         "oracle_speed_kmh,accuracy,failure\n";
  for (const auto& r : report.rounds) {
    if (r.ok) {
      fmt::print(out, "{},1,{},{},{},{:.6f},{},{:.2f},{:.9f},\n", r.round,
                 join_ids(r.active), join_ids(r.dummy_routed),
                 r.recommendation.index, r.recommendation.speed, r.grid_argmin,
                 r.oracle.s_star, r.accuracy);
    } else {
      fmt::print(out, "{},0,{},{},,,,,,{}\n", r.round, join_ids(r.active),
                 join_ids(r.dummy_routed), csv_field(r.failure));
    }
  }
}

void write_traffic_csv(const ScenarioReport& report, std::ostream& out) {
  out << "round,v2v_messages,v2v_bytes,v2b_messages,v2b_bytes,broadcast_bytes,"
         "total_bytes\n";
  for (const auto& r : report.rounds) {
    if (!r.ok) continue;
    const auto& t = r.traffic;
    fmt::print(out, "{},{},{},{},{},{},{}\n", r.round, t.v2v_messages(),
               t.v2v_bytes, t.v2b_messages(), t.v2b_bytes, t.broadcast_bytes,
               t.total_bytes());
  }
}

void write_accuracy_csv(std::span<const AccuracyRow> rows, std::ostream& out) {
  out << "m,index,speed_kmh,accuracy\n";
  for (const auto& row : rows) {
    fmt::print(out, "{},{},{:.6f},{:.9f}\n", row.m, row.index, row.speed,
               row.accuracy);
  }
}

void write_baseline_trace_csv(const BaselineComparison& cmp, const Fleet& fleet,
                              std::ostream& out) {
  out << "iteration";
  for (const auto& v : fleet) out << ",s_" << v.id.value << "_kmh";
  out << ",residual\n";
  for (std::size_t k = 0; k < cmp.dp.states.size(); ++k) {
    out << k;
    for (Eigen::Index i = 0; i < cmp.dp.states[k].size(); ++i) {
      fmt::print(out, ",{:.6f}", cmp.dp.states[k][i]);
    }
    fmt::print(out, ",{:.9f}\n", cmp.dp.residual_history[k]);
  }
}

std::string baseline_json(const BaselineComparison& cmp) {
  nlohmann::ordered_json j;
  j["protocol_rounds"] = cmp.protocol_rounds;
  j["protocol_speed_kmh"] = cmp.protocol_speed;
  j["dp_iterations"] = cmp.dp.iterations;
  j["dp_converged"] = cmp.dp.converged;
  j["dp_speed_kmh"] = cmp.dp_speed;
  j["oracle_speed_kmh"] = cmp.oracle_speed;
  j["mu"] = cmp.mu;
  j["gap_kmh"] = cmp.gap;
  return j.dump(2) + "\n";
}

std::string summary_json(const ScenarioReport& report) {
  nlohmann::ordered_json j;
  j["name"] = report.name;
  j["grid_points"] = report.grid.size();
  j["all_rounds_ok"] = report.all_rounds_ok();
  auto& rounds = j["rounds"] = nlohmann::ordered_json::array();
  for (const auto& r : report.rounds) {
    nlohmann::ordered_json jr;
    jr["round"] = r.round;
    jr["ok"] = r.ok;
    std::vector<std::int32_t> active, routed;
    for (auto v : r.active) active.push_back(v.value);
    for (auto v : r.dummy_routed) routed.push_back(v.value);
    jr["active"] = active;
    jr["dummy_routed"] = routed;
    if (r.ok) {
      jr["recommended_index"] = r.recommendation.index;
      jr["recommended_speed_kmh"] = r.recommendation.speed;
      jr["grid_argmin_index"] = r.grid_argmin;
      jr["oracle_speed_kmh"] = r.oracle.s_star;
      jr["oracle_total_g_per_km"] = r.oracle.f_star;
      jr["accuracy"] = r.accuracy;
      jr["max_abs_base_deviation"] =
          r.privacy.base_deviation.cwiseAbs().maxCoeff();
      jr["v2v_bytes"] = r.traffic.v2v_bytes;
      jr["v2b_bytes"] = r.traffic.v2b_bytes;
      jr["broadcast_bytes"] = r.traffic.broadcast_bytes;
    } else {
      jr["failure"] = r.failure;
    }
    rounds.push_back(std::move(jr));
  }
  if (report.baseline) {
    j["baseline"] = nlohmann::ordered_json::parse(baseline_json(*report.baseline));
  }
  return j.dump(2) + "\n";
}

void write_report_files(const ScenarioReport& report, const Fleet& fleet,
                        const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    auto out = open_for_write(dir / "aggregate_curve.csv");
    write_aggregate_csv(report, out);
  }
  {
    auto out = open_for_write(dir / "local_error.csv");
    write_local_error_csv(report, out);
  }
  {
    auto out = open_for_write(dir / "recommendations.csv");
    write_recommendations_csv(report, out);
  }
  {
    auto out = open_for_write(dir / "traffic.csv");
    write_traffic_csv(report, out);
  }
  {
    auto out = open_for_write(dir / "summary.json");
    out << summary_json(report);
  }
  if (report.baseline) {
    auto out = open_for_write(dir / "baseline_trace.csv");
    write_baseline_trace_csv(*report.baseline, fleet, out);
  }
}

}  // namespace csas
