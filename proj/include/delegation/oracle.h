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

#ifndef DELEGATION_ORACLE_H_
#define DELEGATION_ORACLE_H_

// Independent checks on the named strategies: exhaustive best-response
// search over a discretized strategy space, and Monte Carlo estimates of
// how often an adequate winner is cut off in exploitation.
//
// Grid points run through exactly the same mechanism code as the named
// strategies; only the ProviderPolicy differs.

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "delegation/mechanism.h"
#include "delegation/model.h"
#include "delegation/strategy.h"
#include "json.hpp"

namespace delegation {

struct ReportRule {
  enum class Kind { kTruthful, kPadTo };
  Kind kind = Kind::kTruthful;
  int length = 0;  // kPadTo: report max(length, generated).

  bool operator==(const ReportRule&) const = default;
};

struct PhasePlay {
  int variant = 0;
  ReportRule report;

  bool operator==(const PhasePlay&) const = default;
};

// Fixed per-phase behaviour, indexed like kAllPhases.
using PhaseTable = std::array<PhasePlay, 4>;

class TablePolicy final : public ProviderPolicy {
 public:
  explicit TablePolicy(PhaseTable table) : table_(table) {}

  void Inform(const ProviderProfile&, double) override {}
  int ServingVariant(const ProviderProfile& profile,
                     Phase phase) const override;
  Action Respond(const ProviderProfile& profile,
                 const Observation& obs) const override;

 private:
  PhaseTable table_;
};

using GridPoint = std::variant<StrategyKind, PhaseTable>;

std::string GridPointLabel(const GridPoint& point);

struct StrategyGrid {
  std::vector<GridPoint> points;
};

inline constexpr std::size_t kDefaultGridCap = 10000;

// Exploration and both blind-trust phases: every variant with a truthful or
// an L report. Exploitation: every variant with a truthful report, padding
// to each of `report_lengths`, or L. The six named strategies are appended.
StrategyGrid BuildStrategyGrid(const ProviderProfile& profile,
                               std::span<const int> report_lengths);

// `count` pad lengths evenly spaced strictly between ceil(min g) and L.
std::vector<int> EvenReportLengths(const ProviderProfile& profile, int count);

struct DominanceReport {
  int focal = 0;
  StrategyKind named = StrategyKind::kOurs;
  std::vector<StrategyKind> opponents;  // Full assignment; focal slot unused.
  std::vector<std::uint64_t> seeds;
  double named_utility = 0.0;   // Mean over seeds.
  double grid_max_utility = 0.0;
  std::string best_point;
  double margin = 0.0;          // grid_max - named.
  std::int64_t T = 0;
  double epsilon = 0.0;
  double C = 0.0;
  double bound = 0.0;           // C T^{1-eps} ln T.
  std::size_t grid_size = 0;
};

double DominanceBound(double C, std::int64_t T, double epsilon);

// Mean provider utility of `focal` when it follows `point` against
// `assignment` (focal slot ignored), over `seeds`.
double FocalUtility(const GameConfig& config,
                    std::span<const ProviderProfile> profiles, int focal,
                    std::span<const StrategyKind> assignment,
                    const GridPoint& point,
                    std::span<const std::uint64_t> seeds);

// Exhaustive search over `grid` for the focal provider. Throws ConfigError
// if the grid exceeds `cap` points. The named strategy is always evaluated,
// so the margin is non-negative whenever it is also on the grid.
DominanceReport BestResponseSearch(const GameConfig& config,
                                   std::span<const ProviderProfile> profiles,
                                   int focal,
                                   std::span<const StrategyKind> opponents,
                                   const StrategyGrid& grid,
                                   std::span<const std::uint64_t> seeds,
                                   StrategyKind named = StrategyKind::kOurs,
                                   double C = 1.0,
                                   std::size_t cap = kDefaultGridCap,
                                   int workers = 0);

// Worst margin over several opponent assignments.
DominanceReport WorstCaseDominance(
    const GameConfig& config, std::span<const ProviderProfile> profiles,
    int focal, std::span<const std::vector<StrategyKind>> opponent_sets,
    const StrategyGrid& grid, std::span<const std::uint64_t> seeds,
    StrategyKind named = StrategyKind::kOurs, double C = 1.0,
    std::size_t cap = kDefaultGridCap, int workers = 0);

nlohmann::json DominanceToJson(const DominanceReport& report);

struct FailureRate {
  std::int64_t runs = 0;
  std::int64_t failures = 0;
  double rate = 0.0;
  double ci_low = 0.0;   // 95% Wilson interval.
  double ci_high = 0.0;
};

// Fraction of `runs` seeded executions that end with validated = false.
// Throws ConfigError("insufficient replications") for runs < 30.
FailureRate ValidatedFailureRate(const GameConfig& config,
                                 std::span<const ProviderProfile> profiles,
                                 std::span<const StrategyKind> strategies,
                                 int runs);

}  // namespace delegation

#endif  // DELEGATION_ORACLE_H_
