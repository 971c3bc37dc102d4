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

// CSV and JSON writers for scenario outputs. Column order is fixed and
// numbers are printed with fixed precision so identical runs produce
// identical bytes.

#include <filesystem>
#include <ostream>
#include <span>
#include <string>

#include "csas/harness.hpp"

namespace csas {

// round,speed_kmh,base_station_raw,base_station_value,unmasked,true_total_g_per_km,deviation
void write_aggregate_csv(const ScenarioReport& report, std::ostream& out);
// round,vehicle,speed_kmh,local_error
void write_local_error_csv(const ScenarioReport& report, std::ostream& out);
// round,ok,active,dummy_routed,index,speed_kmh,grid_argmin_index,oracle_speed_kmh,accuracy,failure
void write_recommendations_csv(const ScenarioReport& report, std::ostream& out);
// round,v2v_messages,v2v_bytes,v2b_messages,v2b_bytes,broadcast_bytes,total_bytes
void write_traffic_csv(const ScenarioReport& report, std::ostream& out);
// m,index,speed_kmh,accuracy
void write_accuracy_csv(std::span<const AccuracyRow> rows, std::ostream& out);
// iteration,s_<id>...,residual
void write_baseline_trace_csv(const BaselineComparison& cmp, const Fleet& fleet,
                              std::ostream& out);

std::string summary_json(const ScenarioReport& report);
std::string baseline_json(const BaselineComparison& cmp);

/// Writes aggregate_curve.csv, local_error.csv, recommendations.csv,
/// traffic.csv, summary.json (and baseline_trace.csv when present) into dir.
void write_report_files(const ScenarioReport& report, const Fleet& fleet,
                        const std::filesystem::path& dir);

}  // namespace csas
