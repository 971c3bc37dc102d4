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

#include "csas/cli.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "csas/harness.hpp"
#include "csas/report_io.hpp"

namespace csas {

namespace fs = std::filesystem;

std::vector<std::size_t> parse_m_list(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      tokens.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  tokens.push_back(cur);

  auto to_size = [](const std::string& t) {
    if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos) {
      throw std::invalid_argument("'" + t + "' is not a grid size");
    }
    return static_cast<std::size_t>(std::stoull(t));
  };

  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] != "...") {
      out.push_back(to_size(tokens[i]));
      continue;
    }
    if (out.size() < 2 || i + 1 >= tokens.size()) {
      throw std::invalid_argument("'...' needs two terms before and one after");
    }
    const std::size_t a = out[out.size() - 2];
    const std::size_t b = out.back();
    const std::size_t end = to_size(tokens[i + 1]);
    if (b <= a || end < b || (end - b) % (b - a) != 0) {
      throw std::invalid_argument("'...' does not form an increasing progression");
    }
    for (std::size_t m = b + (b - a); m <= end; m += b - a) out.push_back(m);
    ++i;
  }
  if (out.empty()) throw std::invalid_argument("empty M list");
  return out;
}

namespace {

struct Options {
  std::string config;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::string m_list;
  bool baseline = false;
  int verbosity = 0;
};

fs::path resolve_out(const Options& opt) {
  if (!opt.out_dir.empty()) return opt.out_dir;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return "csas-out";
}

ScenarioConfig load_with_overrides(const Options& opt) {
  ScenarioConfig cfg = load_scenario(opt.config);
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.baseline) cfg.baseline.enabled = true;
  return cfg;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + p.string());
  out << text;
}

int report_rounds(const ScenarioReport& report, int verbosity,
                  std::ostream& out, std::ostream& err) {
  for (const auto& r : report.rounds) {
    if (r.ok) {
      if (verbosity > 0 || report.rounds.size() == 1) {
        fmt::print(out, "{} round {}: recommend {:.3f} km/h (index {}), accuracy {:.6f}\n",
                   report.name, r.round, r.recommendation.speed,
                   r.recommendation.index, r.accuracy);
      }
    } else {
      fmt::print(err, "{} round {} failed: {}\n", report.name, r.round, r.failure);
    }
  }
  if (report.baseline) {
    fmt::print(out, "baseline: {} iterations, {:.3f} km/h (protocol {:.3f} km/h, 1 round)\n",
               report.baseline->dp.iterations, report.baseline->dp_speed,
               report.baseline->protocol_speed);
  }
  return report.all_rounds_ok() ? kExitOk : kExitRoundFailure;
}

int cmd_run(const Options& opt, std::ostream& out, std::ostream& err) {
  const ScenarioConfig cfg = load_with_overrides(opt);
  const ScenarioReport report = run_scenario(cfg);
  const fs::path dir = resolve_out(opt);
  write_report_files(report, initial_fleet(cfg), dir);
  return report_rounds(report, opt.verbosity, out, err);
}

std::vector<AccuracyRow> sweep(const ScenarioConfig& cfg, const Options& opt) {
  std::vector<std::size_t> ms;
  if (!opt.m_list.empty()) {
    ms = parse_m_list(opt.m_list);
  } else if (!cfg.sweep_m.empty()) {
    ms = cfg.sweep_m;
  } else {
    ms = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  }
  return sweep_m(cfg, ms);
}

int cmd_sweep(const Options& opt, std::ostream& out) {
  const ScenarioConfig cfg = load_with_overrides(opt);
  const auto rows = sweep(cfg, opt);
  const fs::path dir = resolve_out(opt);
  fs::create_directories(dir);
  std::ofstream csv(dir / "accuracy.csv", std::ios::binary);
  if (!csv) throw ConfigError("cannot write " + (dir / "accuracy.csv").string());
  write_accuracy_csv(rows, csv);
  for (const auto& row : rows) {
    fmt::print(out, "M={:<4} speed {:8.3f} km/h  accuracy {:.6f}\n", row.m,
               row.speed, row.accuracy);
  }
  return kExitOk;
}

int cmd_compare(const Options& opt, std::ostream& out) {
  const ScenarioConfig cfg = load_with_overrides(opt);
  const BaselineComparison cmp = compare_baseline(cfg);
  const fs::path dir = resolve_out(opt);
  fs::create_directories(dir);
  write_text(dir / "baseline.json", baseline_json(cmp));
  std::ofstream trace(dir / "baseline_trace.csv", std::ios::binary);
  write_baseline_trace_csv(cmp, initial_fleet(cfg), trace);
  fmt::print(out,
             "protocol: 1 round, {:.3f} km/h\nbaseline: {} iterations ({}), "
             "{:.3f} km/h\ngap: {:.3f} km/h, oracle {:.2f} km/h\n",
             cmp.protocol_speed, cmp.dp.iterations,
             cmp.dp.converged ? "converged" : "not converged", cmp.dp_speed,
             cmp.gap, cmp.oracle_speed);
  return cmp.dp.converged ? kExitOk : kExitRoundFailure;
}

void copy_as(const fs::path& from, const fs::path& to) {
  fs::copy_file(from, to, fs::copy_options::overwrite_existing);
}

int cmd_reproduce(const Options& opt, std::ostream& out, std::ostream& err) {
  const fs::path dir = resolve_out(opt);
  int status = kExitOk;
  for (int which : {1, 2}) {
    ScenarioConfig cfg = builtin_case(which);
    if (opt.seed) cfg.seed = *opt.seed;
    cfg.baseline.enabled = which == 1;
    const auto report = run_scenario(cfg);
    const fs::path sub = dir / cfg.name;
    write_report_files(report, initial_fleet(cfg), sub);
    const std::string tag = which == 1 ? "identity_mask" : "affine_mask";
    copy_as(sub / "local_error.csv", dir / (tag + "_local_error.csv"));
    copy_as(sub / "aggregate_curve.csv", dir / (tag + "_aggregate_curve.csv"));
    const int rc = report_rounds(report, opt.verbosity, out, err);
    if (rc != kExitOk) status = rc;
  }
  ScenarioConfig case3 = builtin_case(3);
  if (opt.seed) case3.seed = *opt.seed;
  std::vector<std::size_t> ms = {10};
  ms.insert(ms.end(), case3.sweep_m.begin(), case3.sweep_m.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
  const auto rows = sweep_m(case3, ms);
  fs::create_directories(dir / case3.name);
  {
    std::ofstream csv(dir / case3.name / "accuracy.csv", std::ios::binary);
    write_accuracy_csv(rows, csv);
  }
  copy_as(dir / case3.name / "accuracy.csv", dir / "accuracy_vs_m.csv");
  for (const auto& row : rows) {
    fmt::print(out, "case3 M={:<4} accuracy {:.6f}\n", row.m, row.accuracy);
  }
  fmt::print(out, "outputs written to {}\n", dir.string());
  return status;
}

}  // namespace

int cli_run(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Privacy-preserving consensus speed advisory simulator"};
  app.require_subcommand(1);
  app.footer(std::string("Environment: ") + kOutDirEnv +
             " sets the output directory when --out is not given.\n"
             "Exit codes: 2 bad arguments, 3 invalid config, 4 round failure.");

  Options opt;
  auto add_common = [&opt](CLI::App* sub, bool needs_config) {
    auto* cfg = sub->add_option("--config", opt.config, "Scenario file (JSON)");
    if (needs_config) cfg->required();
    sub->add_option("--out", opt.out_dir, "Output directory");
    sub->add_option("--seed", opt.seed, "Override the scenario seed");
    sub->add_flag("-v,--verbose", opt.verbosity, "Print per-round details");
  };

  auto* run = app.add_subcommand("run", "Run a scenario and write its reports");
  add_common(run, true);
  run->add_flag("--baseline", opt.baseline, "Attach the iterative baseline comparison");

  auto* sweep_cmd = app.add_subcommand("sweep-m", "Accuracy versus grid size M");
  add_common(sweep_cmd, true);
  sweep_cmd->add_option("--m", opt.m_list, "Grid sizes, e.g. 10,20,...,100");

  auto* compare = app.add_subcommand("compare-baseline",
                                     "One protocol round versus the iterative baseline");
  add_common(compare, true);

  auto* reproduce = app.add_subcommand(
      "reproduce-paper", "Run the three built-in experiments and write their CSVs");
  add_common(reproduce, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitBadArguments;
  }

  try {
    if (run->parsed()) return cmd_run(opt, out, err);
    if (sweep_cmd->parsed()) return cmd_sweep(opt, out);
    if (compare->parsed()) return cmd_compare(opt, out);
    if (reproduce->parsed()) return cmd_reproduce(opt, out, err);
  } catch (const std::invalid_argument& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitBadArguments;
  } catch (const ConfigError& e) {
    fmt::print(err, "invalid configuration: {}\n", e.what());
    return kExitInvalidConfig;
  } catch (const BaselineInapplicableError& e) {
    fmt::print(err, "baseline not applicable: {}\n", e.what());
    return kExitInvalidConfig;
  } catch (const Error& e) {
    fmt::print(err, "round failure: {}\n", e.what());
    return kExitRoundFailure;
  } catch (const fs::filesystem_error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitInvalidConfig;
  }
  return kExitBadArguments;
}

}  // namespace csas
