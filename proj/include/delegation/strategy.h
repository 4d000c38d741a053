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

#ifndef DELEGATION_STRATEGY_H_
#define DELEGATION_STRATEGY_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "delegation/model.h"

namespace delegation {

enum class Phase { kExploration, kExploitation, kBlindTrust1, kBlindTrust2 };

inline constexpr std::array<Phase, 4> kAllPhases = {
    Phase::kExploration, Phase::kExploitation, Phase::kBlindTrust1,
    Phase::kBlindTrust2};

const char* PhaseName(Phase phase);

struct Action {
  int variant_index = 0;
  int reported_length = 1;

  bool operator==(const Action&) const = default;
};

struct Observation {
  Phase phase = Phase::kExploration;
  // Set only for the selected provider during exploitation.
  std::optional<double> informed_u_bar_prime;
  std::int64_t query_index_in_phase = 0;
  OutcomeSample generated;
};

enum class StrategyKind {
  kOurs,
  kHonest,
  kDishonestModel,
  kDishonestLength,
  kDishonestAll,
  kOursHonestLength,
};

inline constexpr std::array<StrategyKind, 6> kAllStrategies = {
    StrategyKind::kOurs,           StrategyKind::kHonest,
    StrategyKind::kDishonestModel, StrategyKind::kDishonestLength,
    StrategyKind::kDishonestAll,   StrategyKind::kOursHonestLength};

// CLI spelling: ours | honest | dishonest-model | dishonest-length |
// dishonest-all | ours-honest-length.
const char* StrategyName(StrategyKind kind);
// Throws std::invalid_argument for unknown names.
StrategyKind ParseStrategy(std::string_view name);

// What a strategy does within one phase.
enum class PhaseChoice {
  kHonest,                   // Truthful variant, truthful length.
  kSecondBest,               // Planned variant, pad report up to l'.
  kSecondBestHonestLength,   // Planned variant, truthful length.
  kWorstModel,               // Cheapest variant, truthful length.
  kWorstLength,              // Truthful variant, report L.
  kWorst,                    // Cheapest variant, report L.
};

PhaseChoice ChoiceFor(StrategyKind kind, Phase phase);

// Outcome of the exploitation-phase program
//   max p*l - c*l  s.t.  h(c) - p*l >= u_bar',  l in [g(c), L]
// over the discrete lineup.
struct SecondBestPlan {
  int chosen_variant = 0;
  double target_report_length = 0.0;  // l', possibly fractional.
  bool feasible = false;
  double objective = 0.0;
};

SecondBestPlan ComputeSecondBestPlan(const ProviderProfile& profile,
                                     double u_bar_prime, bool honest_length);

// Cheapest variant billed at L; the deviation once the floor cannot be met.
Action InfeasibleFallback(const ProviderProfile& profile);

// Variant served in `phase`. Depends only on the phase and the plan, never on
// the generated outcome.
int ServingVariant(StrategyKind kind, const ProviderProfile& profile,
                   Phase phase, const SecondBestPlan* plan);

// Full action once the serving variant has generated `obs.generated`.
// Throws std::invalid_argument when a plan is required but missing.
Action Decide(StrategyKind kind, const ProviderProfile& profile,
              const Observation& obs, const SecondBestPlan* plan);

// Decision layer driven by the mechanism. One instance per provider per run.
class ProviderPolicy {
 public:
  virtual ~ProviderPolicy() = default;

  // Called once, before exploitation, on the selected provider only.
  virtual void Inform(const ProviderProfile& profile, double u_bar_prime) = 0;
  virtual int ServingVariant(const ProviderProfile& profile,
                             Phase phase) const = 0;
  virtual Action Respond(const ProviderProfile& profile,
                         const Observation& obs) const = 0;
};

class NamedPolicy final : public ProviderPolicy {
 public:
  explicit NamedPolicy(StrategyKind kind) : kind_(kind) {}

  void Inform(const ProviderProfile& profile, double u_bar_prime) override;
  int ServingVariant(const ProviderProfile& profile,
                     Phase phase) const override;
  Action Respond(const ProviderProfile& profile,
                 const Observation& obs) const override;

  StrategyKind kind() const { return kind_; }
  const std::optional<SecondBestPlan>& plan() const { return plan_; }

 private:
  StrategyKind kind_;
  std::optional<SecondBestPlan> plan_;
};

}  // namespace delegation

#endif  // DELEGATION_STRATEGY_H_
