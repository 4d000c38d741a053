// Copyright 2026 The Delegation Mechanism Authors.
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

#include "cli.h"

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "delegation/accounting.h"
#include "delegation/config.h"
#include "delegation/harness.h"
#include "delegation/mechanism.h"
#include "delegation/oracle.h"

namespace delegation {
namespace {

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> T;
  std::optional<double> epsilon;
  int replications = 5;
  std::string out;
  int workers = 0;
};

void AddCommon(CLI::App* cmd, CommonOptions& o, bool sweeps) {
  cmd->add_option("--config", o.config, "Config file (JSON)")->required();
  cmd->add_option("--seed", o.seed, "Base RNG seed (overrides config)");
  cmd->add_option("--T", o.T, "Total query budget (overrides config)");
  cmd->add_option("--epsilon", o.epsilon, "Exponent in (0, 0.5)");
  cmd->add_option("--out", o.out, "Output directory");
  if (sweeps) {
    cmd->add_option("--replications", o.replications,
                    "Seeded repeats per assignment");
    cmd->add_option("--workers", o.workers, "Worker threads (0: all cores)");
  }
}

LoadedConfig Load(const CommonOptions& o) {
  LoadedConfig loaded = LoadConfig(o.config);
  if (o.seed) loaded.game.seed = *o.seed;
  if (o.T) loaded.game.T = *o.T;
  if (o.epsilon) loaded.game.epsilon = *o.epsilon;
  loaded.game.Validate();
  return loaded;
}

std::vector<StrategyKind> ParseAssignment(const std::string& text, int K,
                                          StrategyKind fallback) {
  std::vector<StrategyKind> out;
  if (text.empty()) return std::vector<StrategyKind>(K, fallback);
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(ParseStrategy(item));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (static_cast<int>(out.size()) != K) {
    throw ConfigError("--strategies must list exactly K=" +
                      std::to_string(K) + " strategies");
  }
  return out;
}

// "1=ours,3=honest" pins providers for a conditional sweep.
std::vector<std::optional<StrategyKind>> ParsePins(
    const std::vector<std::string>& pins, int K) {
  std::vector<std::optional<StrategyKind>> out(K);
  for (const std::string& pin : pins) {
    const std::size_t eq = pin.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("--fix expects PROVIDER=STRATEGY, got '" + pin + "'");
    }
    int id = 0;
    try {
      id = std::stoi(pin.substr(0, eq));
    } catch (const std::exception&) {
      throw ConfigError("--fix: bad provider id in '" + pin + "'");
    }
    if (id < 1 || id > K) throw ConfigError("--fix: provider out of range");
    try {
      out[id - 1] = ParseStrategy(pin.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  return out;
}

void PrintAssumptions(const AssumptionReport& report, std::ostream& out) {
  if (report.holds) {
    out << "assumptions hold\n";
    return;
  }
  out << "assumptions violated (" << report.violations.size() << ")\n";
  for (const AssumptionViolation& v : report.violations) {
    out << "  provider " << v.provider_id << " variants " << v.lower_variant
        << "->" << v.upper_variant << " "
        << AssumptionConditionName(v.condition) << " margin " << v.margin
        << '\n';
  }
}

void PrintTable(int provider, std::span<const SummaryRow> rows,
                std::ostream& out) {
  out << "provider " << provider << '\n';
  WriteSummaryCsv(rows, out);
}

int CmdRun(const CommonOptions& o, const std::string& strategies,
           bool json_report, std::ostream& out) {
  const LoadedConfig loaded = Load(o);
  const auto assignment =
      ParseAssignment(strategies, loaded.game.K, StrategyKind::kOurs);
  const Transcript t =
      RunMechanism(loaded.game, loaded.providers, assignment);
  const UtilityReport report = MakeReport(t, loaded.providers);
  if (!o.out.empty()) {
    std::filesystem::create_directories(o.out);
    std::ofstream tr(std::filesystem::path(o.out) / "transcript.ndjson");
    WriteTranscript(t, tr);
    std::ofstream js(std::filesystem::path(o.out) / "report.json");
    js << ReportToJson(report).dump(2) << '\n';
    std::ofstream csv(std::filesystem::path(o.out) / "report.csv");
    WriteReportCsv(report, csv);
    SweepSpec spec;
    spec.mode = SweepMode::kSingle;
    spec.replications = 1;
    SweepRuns runs;
    RunOutcome outcome;
    outcome.assignment = assignment;
    outcome.seed = loaded.game.seed;
    runs.runs.push_back(outcome);
    std::ofstream meta(std::filesystem::path(o.out) / "run_meta.json");
    meta << RunMeta(loaded.game, loaded.providers, spec, runs).dump(2)
         << '\n';
  }
  if (json_report) {
    out << ReportToJson(report).dump(2) << '\n';
    return kExitOk;
  }
  out << "B=" << t.params.B << " M=" << t.params.M << " T_R=" << t.params.T_R
      << " i*=" << t.winner.i_star << " u_bar'=" << t.winner.u_bar_prime
      << " validated=" << (t.validated ? "true" : "false")
      << " records=" << t.records.size() << '\n';
  out << "user_utility=" << report.user_total << " u_SB=" << report.u_sb
      << " gap_to_SB=" << report.gap_to_sb << '\n';
  for (const UtilityLine& l : report.per_provider) {
    out << "provider " << l.provider << " ("
        << StrategyName(assignment[l.provider - 1])
        << "): utility=" << l.provider_utility
        << " delegations=" << l.delegations
        << " user_utility=" << l.user_utility << '\n';
  }
  return kExitOk;
}

int CmdSweep(const CommonOptions& o, const std::vector<std::string>& pins,
             bool keep_transcripts, std::ostream& out, std::ostream& err) {
  const LoadedConfig loaded = Load(o);
  SweepSpec spec;
  spec.mode = SweepMode::kPermutation;
  spec.assignment = ParsePins(pins, loaded.game.K);
  spec.replications = o.replications;
  spec.out_dir = o.out;
  spec.workers = o.workers;
  RunObserver observer;
  if (keep_transcripts) {
    if (o.out.empty()) throw ConfigError("--keep-transcripts needs --out");
    const std::filesystem::path dir =
        std::filesystem::path(o.out) / "transcripts";
    std::filesystem::create_directories(dir);
    observer = [dir](const RunOutcome& run, const Transcript& t) {
      std::ofstream f(dir /
                      ("run" + std::to_string(run.index) + ".ndjson"));
      WriteTranscript(t, f);
    };
  }
  const SweepTables tables =
      RunConditionalSweep(loaded.game, loaded.providers, spec, observer);
  if (!tables.assumptions.holds) {
    err << "warning: ";
    PrintAssumptions(tables.assumptions, err);
  }
  for (std::size_t i = 0; i < tables.tables.size(); ++i) {
    if (tables.tables[i].empty()) continue;
    PrintTable(static_cast<int>(i) + 1, tables.tables[i], out);
  }
  return kExitOk;
}

int CmdTSweep(const CommonOptions& o, const std::vector<std::int64_t>& ts,
              std::ostream& out) {
  const LoadedConfig loaded = Load(o);
  SweepSpec spec;
  spec.mode = SweepMode::kTSweep;
  spec.t_values = ts;
  if (spec.t_values.empty()) spec.t_values = {loaded.game.T};
  spec.replications = o.replications;
  spec.out_dir = o.out;
  spec.workers = o.workers;
  const auto rows = RunTSweep(loaded.game, loaded.providers, spec);
  WriteTSweepCsv(rows, out);
  return kExitOk;
}

int CmdCheck(const CommonOptions& o, bool strict, std::ostream& out) {
  const LoadedConfig loaded = Load(o);
  const AssumptionReport report =
      CheckLineup(loaded.providers, loaded.game.gamma);
  PrintAssumptions(report, out);
  return (strict && !report.holds) ? kExitAssumptionFailure : kExitOk;
}

int CmdBench(const CommonOptions& o, std::ostream& out) {
  const LoadedConfig loaded = Load(o);
  const Benchmarks b = ComputeBenchmarks(loaded.providers, loaded.game.T);
  const auto precision = out.precision(12);
  out << "u_FB=" << b.u_fb << '\n'
      << "u_SB=" << b.u_sb << '\n'
      << "best_provider=" << b.best_id << '\n';
  out.precision(precision);
  return kExitOk;
}

struct OracleOptions {
  int focal = 1;
  std::string opponents;
  std::string named = "ours";
  int lengths = 5;
  int seeds = 3;
  double C = 1.0;
  std::size_t cap = kDefaultGridCap;
};

int CmdOracle(const CommonOptions& o, const OracleOptions& oo,
              std::ostream& out) {
  const LoadedConfig loaded = Load(o);
  const int K = loaded.game.K;
  if (oo.focal < 1 || oo.focal > K) {
    throw ConfigError("--focal out of range");
  }
  std::vector<std::vector<StrategyKind>> opponent_sets;
  if (oo.opponents.empty()) {
    std::vector<std::optional<StrategyKind>> choices(K);
    choices[oo.focal - 1] = StrategyKind::kOurs;
    opponent_sets = EnumerateAssignments(choices);
  } else {
    opponent_sets.push_back(ParseAssignment(oo.opponents, K,
                                            StrategyKind::kOurs));
  }
  StrategyKind named;
  try {
    named = ParseStrategy(oo.named);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const ProviderProfile& focal = loaded.providers[oo.focal - 1];
  const auto lengths = EvenReportLengths(focal, oo.lengths);
  const StrategyGrid grid = BuildStrategyGrid(focal, lengths);
  std::vector<std::uint64_t> seeds;
  for (int s = 0; s < oo.seeds; ++s) {
    seeds.push_back(loaded.game.seed + MixSeed(static_cast<std::uint64_t>(s)));
  }
  const DominanceReport report =
      WorstCaseDominance(loaded.game, loaded.providers, oo.focal,
                         opponent_sets, grid, seeds, named, oo.C, oo.cap,
                         o.workers);
  const nlohmann::json doc = DominanceToJson(report);
  if (!o.out.empty()) {
    std::filesystem::create_directories(o.out);
    std::ofstream f(std::filesystem::path(o.out) / "dominance.json");
    f << doc.dump(2) << '\n';
  }
  out << doc.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Delegation mechanism simulator", "delegation"};
  app.require_subcommand(1);

  CommonOptions common;
  std::string strategies;
  bool json_report = false;
  auto* run = app.add_subcommand("run", "Single mechanism run");
  AddCommon(run, common, false);
  run->add_option("--strategies", strategies,
                  "Comma-separated strategy per provider (default: ours)");
  run->add_flag("--json", json_report, "Print the utility report as JSON");

  std::vector<std::string> pins;
  bool keep_transcripts = false;
  auto* sweep = app.add_subcommand("sweep", "Strategy-permutation sweep");
  AddCommon(sweep, common, true);
  sweep->add_option("--fix", pins,
                    "Pin a provider, e.g. --fix 1=ours (conditional sweep)");
  sweep->add_flag("--keep-transcripts", keep_transcripts,
                  "Write every run's transcript under OUT/transcripts");

  std::vector<std::int64_t> t_values;
  auto* tsweep = app.add_subcommand("tsweep", "All-ours runs over a T grid");
  AddCommon(tsweep, common, true);
  tsweep->add_option("--t-values", t_values, "Strictly increasing T values")
      ->delimiter(',');

  bool strict = false;
  auto* check = app.add_subcommand("check", "Cost-performance assumptions");
  AddCommon(check, common, false);
  check->add_flag("--strict", strict, "Exit 3 when assumptions fail");

  auto* bench = app.add_subcommand("bench", "First- and second-best utility");
  AddCommon(bench, common, false);

  OracleOptions oo;
  auto* oracle = app.add_subcommand("oracle", "Grid best-response search");
  AddCommon(oracle, common, false);
  oracle->add_option("--workers", common.workers,
                     "Worker threads (0: all cores)");
  oracle->add_option("--focal", oo.focal, "Focal provider id");
  oracle->add_option("--opponents", oo.opponents,
                     "Full assignment (focal slot ignored); default: all");
  oracle->add_option("--named", oo.named, "Named strategy under test");
  oracle->add_option("--lengths", oo.lengths, "Pad lengths on the grid");
  oracle->add_option("--seeds", oo.seeds, "Seeds per grid point");
  oracle->add_option("--C", oo.C, "Bound constant");
  oracle->add_option("--cap", oo.cap, "Maximum grid size");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*run) return CmdRun(common, strategies, json_report, out);
    if (*sweep) return CmdSweep(common, pins, keep_transcripts, out, err);
    if (*tsweep) return CmdTSweep(common, t_values, out);
    if (*check) return CmdCheck(common, strict, out);
    if (*bench) return CmdBench(common, out);
    if (*oracle) return CmdOracle(common, oo, out);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  }
  return kExitUsage;
}

}  // namespace delegation
