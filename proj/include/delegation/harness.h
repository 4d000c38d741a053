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

#ifndef DELEGATION_HARNESS_H_
#define DELEGATION_HARNESS_H_

// Experiment orchestration: strategy-permutation sweeps, conditional sweeps
// with some providers pinned, and budget (T) sweeps. Runs are independent
// and may execute on several worker threads; every reduction is ordered by
// run index so results do not depend on scheduling.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "delegation/accounting.h"
#include "delegation/mechanism.h"
#include "delegation/model.h"
#include "delegation/strategy.h"
#include "json.hpp"

namespace delegation {

enum class SweepMode { kSingle, kPermutation, kTSweep };

struct SweepSpec {
  SweepMode mode = SweepMode::kPermutation;
  // One entry per provider; nullopt enumerates all six strategies.
  std::vector<std::optional<StrategyKind>> assignment;
  std::vector<std::int64_t> t_values;  // Strictly increasing, t_sweep only.
  int replications = 5;
  std::filesystem::path out_dir;  // Empty: nothing is written.
  int workers = 0;                // 0: hardware concurrency.
  bool keep_transcripts = false;

  // Throws ConfigError for malformed specs.
  void Validate(int K) const;
};

// seed = base_seed + hash(assignment, replication, T).
std::uint64_t RunSeed(std::uint64_t base_seed,
                      std::span<const StrategyKind> assignment,
                      int replication, std::int64_t T);

// Full cross-product of the per-provider choices, first provider slowest.
std::vector<std::vector<StrategyKind>> EnumerateAssignments(
    std::span<const std::optional<StrategyKind>> choices);

struct RunOutcome {
  std::size_t index = 0;
  std::vector<StrategyKind> assignment;
  int replication = 0;
  std::int64_t T = 0;
  std::uint64_t seed = 0;
  int i_star = 0;
  bool validated = false;
  std::int64_t T_R = 0;
  UtilityReport report;
  std::optional<Transcript> transcript;  // Only with keep_transcripts.
};

// Called once per finished run, serialized across workers.
using RunObserver =
    std::function<void(const RunOutcome&, const Transcript&)>;

struct SweepRuns {
  std::vector<RunOutcome> runs;  // Ordered by run index.
};

// Runs every (assignment, replication) pair at budget `T`.
SweepRuns RunAssignments(const GameConfig& config,
                         std::span<const ProviderProfile> profiles,
                         std::span<const std::vector<StrategyKind>> assignments,
                         int replications, int workers, bool keep_transcripts,
                         const RunObserver& observer = nullptr);

struct SummaryRow {
  StrategyKind strategy = StrategyKind::kOurs;
  double mean_provider_utility = 0.0;
  double mean_user_utility = 0.0;
  double mean_delegations = 0.0;
  std::int64_t run_count = 0;
};

// Per-strategy means for provider `focal` (1-based) over all runs; rows in
// kAllStrategies order, strategies the focal provider never played omitted.
std::vector<SummaryRow> Summarize(const SweepRuns& runs, int focal);

struct SweepTables {
  SweepRuns runs;
  // tables[i] summarizes provider i+1; empty for pinned providers.
  std::vector<std::vector<SummaryRow>> tables;
  AssumptionReport assumptions;  // Merged over providers.
};

// Every provider ranges over all six strategies.
SweepTables RunPermutationSweep(const GameConfig& config,
                                std::span<const ProviderProfile> profiles,
                                const SweepSpec& spec,
                                const RunObserver& observer = nullptr);

// spec.assignment pins some providers; tables cover the free ones.
SweepTables RunConditionalSweep(const GameConfig& config,
                                std::span<const ProviderProfile> profiles,
                                const SweepSpec& spec,
                                const RunObserver& observer = nullptr);

struct TSweepRow {
  std::int64_t T = 0;
  double user_utility_mean = 0.0;
  double user_utility_stddev = 0.0;
  double u_sb = 0.0;
  std::int64_t run_count = 0;
};

// All providers play `ours` at each T in spec.t_values.
std::vector<TSweepRow> RunTSweep(const GameConfig& config,
                                 std::span<const ProviderProfile> profiles,
                                 const SweepSpec& spec);

void WriteSummaryCsv(std::span<const SummaryRow> rows, std::ostream& out);
void WriteTSweepCsv(std::span<const TSweepRow> rows, std::ostream& out);

// Config echo, seeds and version for an output directory.
nlohmann::json RunMeta(const GameConfig& config,
                       std::span<const ProviderProfile> profiles,
                       const SweepSpec& spec, const SweepRuns& runs);

// Writes summary_provider<i>.csv for non-empty tables plus run_meta.json.
void WriteSweepOutputs(const GameConfig& config,
                       std::span<const ProviderProfile> profiles,
                       const SweepSpec& spec, const SweepTables& tables);

AssumptionReport CheckLineup(std::span<const ProviderProfile> profiles,
                             double gamma);

inline constexpr const char* kVersion = "1.0.0";

}  // namespace delegation

#endif  // DELEGATION_HARNESS_H_
