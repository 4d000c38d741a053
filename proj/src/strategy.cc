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

#include "delegation/strategy.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace delegation {

const char* PhaseName(Phase phase) {
  switch (phase) {
    case Phase::kExploration:
      return "exploration";
    case Phase::kExploitation:
      return "exploitation";
    case Phase::kBlindTrust1:
      return "blind_trust_1";
    case Phase::kBlindTrust2:
      return "blind_trust_2";
  }
  return "unknown";
}

const char* StrategyName(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::kOurs:
      return "ours";
    case StrategyKind::kHonest:
      return "honest";
    case StrategyKind::kDishonestModel:
      return "dishonest-model";
    case StrategyKind::kDishonestLength:
      return "dishonest-length";
    case StrategyKind::kDishonestAll:
      return "dishonest-all";
    case StrategyKind::kOursHonestLength:
      return "ours-honest-length";
  }
  return "unknown";
}

StrategyKind ParseStrategy(std::string_view name) {
  for (StrategyKind k : kAllStrategies) {
    if (name == StrategyName(k)) return k;
  }
  throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

PhaseChoice ChoiceFor(StrategyKind kind, Phase phase) {
  if (kind == StrategyKind::kHonest) return PhaseChoice::kHonest;
  if (kind == StrategyKind::kDishonestAll) return PhaseChoice::kWorst;
  switch (phase) {
    case Phase::kExploration:
      return PhaseChoice::kHonest;
    case Phase::kBlindTrust1:
    case Phase::kBlindTrust2:
      return PhaseChoice::kWorst;
    case Phase::kExploitation:
      break;
  }
  switch (kind) {
    case StrategyKind::kOurs:
      return PhaseChoice::kSecondBest;
    case StrategyKind::kOursHonestLength:
      return PhaseChoice::kSecondBestHonestLength;
    case StrategyKind::kDishonestModel:
      return PhaseChoice::kWorstModel;
    case StrategyKind::kDishonestLength:
      return PhaseChoice::kWorstLength;
    default:
      return PhaseChoice::kHonest;
  }
}

SecondBestPlan ComputeSecondBestPlan(const ProviderProfile& profile,
                                     double u_bar_prime, bool honest_length) {
  const std::vector<VariantStats> stats = CostPerformance(profile);
  const double p = profile.price_per_token;
  const double L = static_cast<double>(profile.L);
  SecondBestPlan best;
  for (std::size_t m = 0; m < stats.size(); ++m) {
    const double h = stats[m].expected_reward;
    const double g = stats[m].expected_length;
    const double l_max = std::min(L, (h - u_bar_prime) / p);
    if (!(l_max >= g)) continue;
    const double l = honest_length ? g : l_max;
    const double c = profile.variants[m].cost_per_token;
    const double objective = p * l - c * l;
    // Variants are cost-sorted, so keeping the first maximizer breaks ties
    // toward lower cost, then lower index.
    if (!best.feasible || objective > best.objective) {
      best = {static_cast<int>(m), l, true, objective};
    }
  }
  return best;
}

Action InfeasibleFallback(const ProviderProfile& profile) {
  return {profile.CheapestIndex(), profile.L};
}

namespace {

const SecondBestPlan& RequirePlan(StrategyKind kind,
                                  const SecondBestPlan* plan) {
  if (plan == nullptr) {
    throw std::invalid_argument(std::string("strategy '") +
                                StrategyName(kind) +
                                "' needs a second-best plan in exploitation");
  }
  return *plan;
}

}  // namespace

int ServingVariant(StrategyKind kind, const ProviderProfile& profile,
                   Phase phase, const SecondBestPlan* plan) {
  switch (ChoiceFor(kind, phase)) {
    case PhaseChoice::kHonest:
    case PhaseChoice::kWorstLength:
      return profile.TruthfulIndex();
    case PhaseChoice::kWorstModel:
    case PhaseChoice::kWorst:
      return profile.CheapestIndex();
    case PhaseChoice::kSecondBest:
    case PhaseChoice::kSecondBestHonestLength: {
      const SecondBestPlan& p = RequirePlan(kind, plan);
      return p.feasible ? p.chosen_variant
                        : InfeasibleFallback(profile).variant_index;
    }
  }
  return profile.TruthfulIndex();
}

Action Decide(StrategyKind kind, const ProviderProfile& profile,
              const Observation& obs, const SecondBestPlan* plan) {
  const int variant = ServingVariant(kind, profile, obs.phase, plan);
  const int truthful = obs.generated.gen_length;
  switch (ChoiceFor(kind, obs.phase)) {
    case PhaseChoice::kHonest:
    case PhaseChoice::kWorstModel:
      return {variant, truthful};
    case PhaseChoice::kWorstLength:
    case PhaseChoice::kWorst:
      return {variant, profile.L};
    case PhaseChoice::kSecondBest:
    case PhaseChoice::kSecondBestHonestLength: {
      const SecondBestPlan& p = RequirePlan(kind, plan);
      if (!p.feasible) return InfeasibleFallback(profile);
      if (ChoiceFor(kind, obs.phase) == PhaseChoice::kSecondBestHonestLength) {
        return {variant, truthful};
      }
      // Rounded down so the user-utility floor still holds.
      const double floor_l = std::floor(p.target_report_length);
      const int padded = static_cast<int>(
          std::clamp(floor_l, 1.0, static_cast<double>(profile.L)));
      return {variant, std::max(padded, truthful)};
    }
  }
  return {variant, truthful};
}

void NamedPolicy::Inform(const ProviderProfile& profile, double u_bar_prime) {
  if (kind_ == StrategyKind::kOurs ||
      kind_ == StrategyKind::kOursHonestLength) {
    plan_ = ComputeSecondBestPlan(profile, u_bar_prime,
                                  kind_ == StrategyKind::kOursHonestLength);
  }
}

int NamedPolicy::ServingVariant(const ProviderProfile& profile,
                                Phase phase) const {
  return delegation::ServingVariant(kind_, profile, phase,
                                    plan_ ? &*plan_ : nullptr);
}

Action NamedPolicy::Respond(const ProviderProfile& profile,
                            const Observation& obs) const {
  return Decide(kind_, profile, obs, plan_ ? &*plan_ : nullptr);
}

}  // namespace delegation
