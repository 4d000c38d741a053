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

#ifndef DELEGATION_MODEL_H_
#define DELEGATION_MODEL_H_

// Domain types for the user-provider delegation game: game configuration,
// provider lineups with their empirical outcome banks, and the checks that
// decide whether a lineup is well-formed for the mechanism.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "delegation/rng.h"

namespace delegation {

// Raised for anything that makes a configuration unusable: malformed input,
// violated invariants, or parameters the mechanism cannot run with.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GameConfig {
  std::int64_t T = 0;       // Total query budget.
  int K = 0;                // Number of providers.
  double epsilon = 0.0;     // Phase-length exponent, in (0, 1/2).
  std::uint64_t seed = 0;
  double gamma = 0.0;       // Slack for the cost-performance growth check.
  double price_scale = 1e-6;

  // Throws ConfigError naming the offending field.
  void Validate() const;
};

struct OutcomeSample {
  double reward = 0.0;
  int gen_length = 1;

  bool operator==(const OutcomeSample&) const = default;
};

struct SampleBank {
  std::vector<OutcomeSample> samples;
  std::string source_id;
};

struct ModelVariant {
  std::string name;
  double cost_per_token = 0.0;
  SampleBank bank;
};

struct ProviderProfile {
  int id = 1;  // 1-based, matches the provider's position in the lineup.
  double price_per_token = 0.0;
  std::vector<ModelVariant> variants;  // Ascending cost_per_token.
  double R = 1.0;
  int L = 1;

  // The variant whose cost equals the advertised price.
  int TruthfulIndex() const;
  // Zero-cost behaviour in a discrete lineup is the cheapest variant.
  int CheapestIndex() const { return 0; }

  // Throws ConfigError on any invariant violation, naming the first one.
  void Validate() const;
};

// Expected reward h(c) and expected generated length g(c) of one variant.
struct VariantStats {
  double expected_reward = 0.0;
  double expected_length = 0.0;
};

// Bank means; the bank must be non-empty.
VariantStats ExpectedStats(const ModelVariant& variant);

// One entry per variant, in lineup order.
std::vector<VariantStats> CostPerformance(const ProviderProfile& profile);

// Uniform draw with replacement from the variant's bank.
OutcomeSample SampleOutcome(const ModelVariant& variant, Rng& rng);

enum class AssumptionCondition {
  // [h2 - h1] - p [g2 - g1] >= gamma (c2 - c1): user utility grows with cost.
  kUserUtilityGrowth,
  // h2 - c2 g2 >= h1 - c1 g1: reward outpaces total serving cost.
  kRewardOutpacesCost,
};

const char* AssumptionConditionName(AssumptionCondition c);

struct AssumptionViolation {
  int provider_id = 0;
  int lower_variant = 0;  // Index of the cheaper variant of the pair.
  int upper_variant = 0;
  AssumptionCondition condition = AssumptionCondition::kUserUtilityGrowth;
  double margin = 0.0;  // Negative: how far the pair misses the condition.
};

struct AssumptionReport {
  bool holds = true;
  std::vector<AssumptionViolation> violations;
};

// Discrete (upper-difference) version of the cost-performance conditions,
// checked on every adjacent pair of the cost-sorted lineup. Throws
// ConfigError for lineups with fewer than two variants.
AssumptionReport CheckAssumptions(const ProviderProfile& profile,
                                  double gamma);

struct Benchmarks {
  double u_fb = 0.0;
  double u_sb = 0.0;
  int best_id = 0;
};

// Truthful per-query utility mu_r - p * mu_l of one provider.
double TruthfulUtility(const ProviderProfile& profile);

// First-best and second-best user utility over T queries. Requires K >= 2.
Benchmarks ComputeBenchmarks(std::span<const ProviderProfile> profiles,
                             std::int64_t T);

}  // namespace delegation

#endif  // DELEGATION_MODEL_H_
