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

#include "delegation/harness.h"

#include <atomic>
#include <fstream>
#include <mutex>
#include <thread>

#include "delegation/numeric.h"

namespace delegation {

void SweepSpec::Validate(int K) const {
  if (replications < 1) throw ConfigError("replications must be positive");
  if (!assignment.empty() && static_cast<int>(assignment.size()) != K) {
    throw ConfigError("strategy assignment must name one entry per provider");
  }
  if (mode == SweepMode::kTSweep) {
    if (t_values.empty()) throw ConfigError("t_sweep needs T values");
    for (std::size_t i = 0; i < t_values.size(); ++i) {
      if (t_values[i] < 1) throw ConfigError("T values must be positive");
      if (i > 0 && t_values[i] <= t_values[i - 1]) {
        throw ConfigError("T values must be strictly increasing");
      }
    }
  }
}

std::uint64_t RunSeed(std::uint64_t base_seed,
                      std::span<const StrategyKind> assignment,
                      int replication, std::int64_t T) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) { h = MixSeed(h ^ v); };
  for (StrategyKind k : assignment) mix(static_cast<std::uint64_t>(k) + 1);
  mix(0xff00u + static_cast<std::uint64_t>(replication));
  mix(static_cast<std::uint64_t>(T));
  return base_seed + h;
}

std::vector<std::vector<StrategyKind>> EnumerateAssignments(
    std::span<const std::optional<StrategyKind>> choices) {
  std::vector<std::vector<StrategyKind>> out(1);
  for (const std::optional<StrategyKind>& c : choices) {
    std::vector<std::vector<StrategyKind>> next;
    for (const auto& prefix : out) {
      if (c) {
        next.push_back(prefix);
        next.back().push_back(*c);
        continue;
      }
      for (StrategyKind k : kAllStrategies) {
        next.push_back(prefix);
        next.back().push_back(k);
      }
    }
    out = std::move(next);
  }
  return out;
}

SweepRuns RunAssignments(const GameConfig& config,
                         std::span<const ProviderProfile> profiles,
                         std::span<const std::vector<StrategyKind>> assignments,
                         int replications, int workers, bool keep_transcripts,
                         const RunObserver& observer) {
  // Fail fast on configurations the mechanism would reject.
  {
    const LineupBounds b = BoundsOf(profiles);
    const MechanismParams params =
        DeriveParams(config.T, config.K, config.epsilon);
    WorstCaseExploitationLength(config.T, config.K, params.B, b.R, b.prices,
                                b.L);
  }
  SweepRuns result;
  result.runs.resize(assignments.size() * replications);
  for (std::size_t a = 0; a < assignments.size(); ++a) {
    for (int r = 0; r < replications; ++r) {
      RunOutcome& o = result.runs[a * replications + r];
      o.index = a * replications + r;
      o.assignment = assignments[a];
      o.replication = r;
      o.T = config.T;
      o.seed = RunSeed(config.seed, assignments[a], r, config.T);
    }
  }

  std::atomic<std::size_t> next{0};
  std::mutex observer_mu;
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= result.runs.size()) return;
      RunOutcome& o = result.runs[i];
      try {
        GameConfig run_config = config;
        run_config.seed = o.seed;
        Transcript t = RunMechanism(run_config, profiles, o.assignment);
        o.report = MakeReport(t, profiles);
        o.i_star = t.winner.i_star;
        o.validated = t.validated;
        o.T_R = t.params.T_R;
        if (observer) {
          std::lock_guard<std::mutex> lock(observer_mu);
          observer(o, t);
        }
        if (keep_transcripts) o.transcript = std::move(t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = result.runs.size();
        return;
      }
    }
  };
  int n_workers = workers > 0
                      ? workers
                      : static_cast<int>(std::thread::hardware_concurrency());
  n_workers = std::max(1, std::min<int>(n_workers,
                                        static_cast<int>(result.runs.size())));
  if (n_workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return result;
}

std::vector<SummaryRow> Summarize(const SweepRuns& runs, int focal) {
  std::vector<SummaryRow> rows;
  const std::size_t f = static_cast<std::size_t>(focal - 1);
  for (StrategyKind k : kAllStrategies) {
    CompensatedSum provider, user, delegations;
    std::int64_t n = 0;
    for (const RunOutcome& o : runs.runs) {
      if (o.assignment.at(f) != k) continue;
      const UtilityLine& line = o.report.per_provider.at(f);
      provider.Add(line.provider_utility);
      user.Add(line.user_utility);
      delegations.Add(static_cast<double>(line.delegations));
      ++n;
    }
    if (n == 0) continue;
    const double dn = static_cast<double>(n);
    rows.push_back({k, provider.Value() / dn, user.Value() / dn,
                    delegations.Value() / dn, n});
  }
  return rows;
}

AssumptionReport CheckLineup(std::span<const ProviderProfile> profiles,
                             double gamma) {
  AssumptionReport merged;
  for (const ProviderProfile& p : profiles) {
    if (p.variants.size() < 2) continue;  // Vacuous for a single model.
    AssumptionReport r = CheckAssumptions(p, gamma);
    merged.violations.insert(merged.violations.end(), r.violations.begin(),
                             r.violations.end());
  }
  merged.holds = merged.violations.empty();
  return merged;
}

namespace {

SweepTables RunTables(const GameConfig& config,
                      std::span<const ProviderProfile> profiles,
                      const SweepSpec& spec,
                      std::span<const std::optional<StrategyKind>> choices,
                      const RunObserver& observer) {
  spec.Validate(config.K);
  SweepTables out;
  out.assumptions = CheckLineup(profiles, config.gamma);
  const auto assignments = EnumerateAssignments(choices);
  out.runs = RunAssignments(config, profiles, assignments, spec.replications,
                            spec.workers, spec.keep_transcripts, observer);
  out.tables.resize(profiles.size());
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    if (choices[i].has_value()) continue;
    out.tables[i] = Summarize(out.runs, static_cast<int>(i) + 1);
  }
  if (!spec.out_dir.empty()) {
    WriteSweepOutputs(config, profiles, spec, out);
  }
  return out;
}

}  // namespace

SweepTables RunPermutationSweep(const GameConfig& config,
                                std::span<const ProviderProfile> profiles,
                                const SweepSpec& spec,
                                const RunObserver& observer) {
  const std::vector<std::optional<StrategyKind>> all(profiles.size());
  return RunTables(config, profiles, spec, all, observer);
}

SweepTables RunConditionalSweep(const GameConfig& config,
                                std::span<const ProviderProfile> profiles,
                                const SweepSpec& spec,
                                const RunObserver& observer) {
  if (spec.assignment.size() != profiles.size()) {
    throw ConfigError("conditional sweep needs one entry per provider");
  }
  return RunTables(config, profiles, spec, spec.assignment, observer);
}

std::vector<TSweepRow> RunTSweep(const GameConfig& config,
                                 std::span<const ProviderProfile> profiles,
                                 const SweepSpec& spec) {
  spec.Validate(config.K);
  const std::vector<std::vector<StrategyKind>> all_ours = {
      std::vector<StrategyKind>(profiles.size(), StrategyKind::kOurs)};
  std::vector<TSweepRow> rows;
  for (std::int64_t T : spec.t_values) {
    GameConfig c = config;
    c.T = T;
    const SweepRuns runs = RunAssignments(c, profiles, all_ours,
                                          spec.replications, spec.workers,
                                          /*keep_transcripts=*/false);
    std::vector<double> user;
    for (const RunOutcome& o : runs.runs) user.push_back(o.report.user_total);
    TSweepRow row;
    row.T = T;
    row.user_utility_mean = Mean(user);
    row.user_utility_stddev = SampleStddev(user);
    row.u_sb = ComputeBenchmarks(profiles, T).u_sb;
    row.run_count = static_cast<std::int64_t>(user.size());
    rows.push_back(row);
  }
  if (!spec.out_dir.empty()) {
    std::filesystem::create_directories(spec.out_dir);
    std::ofstream out(spec.out_dir / "tsweep.csv");
    WriteTSweepCsv(rows, out);
    SweepRuns none;
    std::ofstream meta(spec.out_dir / "run_meta.json");
    meta << RunMeta(config, profiles, spec, none).dump(2) << '\n';
  }
  return rows;
}

void WriteSummaryCsv(std::span<const SummaryRow> rows, std::ostream& out) {
  out << "strategy,mean_provider_utility,mean_user_utility,mean_delegations,"
         "run_count\n";
  const auto old_precision = out.precision(17);
  for (const SummaryRow& r : rows) {
    out << StrategyName(r.strategy) << ',' << r.mean_provider_utility << ','
        << r.mean_user_utility << ',' << r.mean_delegations << ','
        << r.run_count << '\n';
  }
  out.precision(old_precision);
}

void WriteTSweepCsv(std::span<const TSweepRow> rows, std::ostream& out) {
  out << "T,user_utility_mean,user_utility_stddev,u_SB\n";
  const auto old_precision = out.precision(17);
  for (const TSweepRow& r : rows) {
    out << r.T << ',' << r.user_utility_mean << ',' << r.user_utility_stddev
        << ',' << r.u_sb << '\n';
  }
  out.precision(old_precision);
}

nlohmann::json RunMeta(const GameConfig& config,
                       std::span<const ProviderProfile> profiles,
                       const SweepSpec& spec, const SweepRuns& runs) {
  using nlohmann::json;
  json meta;
  meta["version"] = kVersion;
  const char* mode = spec.mode == SweepMode::kSingle        ? "single"
                     : spec.mode == SweepMode::kPermutation ? "permutation"
                                                            : "t_sweep";
  meta["mode"] = mode;
  meta["config"] = {{"T", config.T},
                    {"K", config.K},
                    {"epsilon", config.epsilon},
                    {"seed", config.seed},
                    {"gamma", config.gamma},
                    {"price_scale", config.price_scale}};
  json providers = json::array();
  for (const ProviderProfile& p : profiles) {
    json variants = json::array();
    for (const ModelVariant& v : p.variants) {
      variants.push_back({{"name", v.name},
                          {"cost_per_token", v.cost_per_token},
                          {"samples", v.bank.samples.size()},
                          {"source", v.bank.source_id}});
    }
    providers.push_back({{"id", p.id},
                         {"price_per_token", p.price_per_token},
                         {"R", p.R},
                         {"L", p.L},
                         {"variants", std::move(variants)}});
  }
  meta["config"]["providers"] = std::move(providers);
  meta["replications"] = spec.replications;
  if (!spec.t_values.empty()) meta["t_values"] = spec.t_values;
  json seeds = json::array();
  for (const RunOutcome& o : runs.runs) {
    json strategies = json::array();
    for (StrategyKind k : o.assignment) strategies.push_back(StrategyName(k));
    seeds.push_back({{"run", o.index},
                     {"assignment", std::move(strategies)},
                     {"replication", o.replication},
                     {"seed", o.seed}});
  }
  meta["runs"] = std::move(seeds);
  return meta;
}

void WriteSweepOutputs(const GameConfig& config,
                       std::span<const ProviderProfile> profiles,
                       const SweepSpec& spec, const SweepTables& tables) {
  std::filesystem::create_directories(spec.out_dir);
  for (std::size_t i = 0; i < tables.tables.size(); ++i) {
    if (tables.tables[i].empty()) continue;
    std::ofstream out(spec.out_dir /
                      ("summary_provider" + std::to_string(i + 1) + ".csv"));
    WriteSummaryCsv(tables.tables[i], out);
  }
  nlohmann::json meta = RunMeta(config, profiles, spec, tables.runs);
  meta["assumptions_hold"] = tables.assumptions.holds;
  std::ofstream out(spec.out_dir / "run_meta.json");
  out << meta.dump(2) << '\n';
}

}  // namespace delegation
