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

#ifndef DELEGATION_MECHANISM_H_
#define DELEGATION_MECHANISM_H_

// The four-phase second-best utility guarantee mechanism:
//
//   1. Exploration: B truthfully-expected queries to every provider.
//   2. Exploitation: up to T_R queries to the best explorer, who must keep
//      the running user utility above the second-best level minus a slack.
//   3. Blind trust I: B queries to every loser, and to the winner if it kept
//      the floor.
//   4. Blind trust II: B * (delta_i + 3) queries per provider, randomized to
//      an integer count, rewarding truthful exploration.
//
// Every delegation is appended to a Transcript, which is the only input the
// accounting layer needs.

#include <cstdint>
#include <memory>
#include <ostream>
#include <span>
#include <vector>

#include "delegation/model.h"
#include "delegation/rng.h"
#include "delegation/strategy.h"

namespace delegation {

struct MechanismParams {
  std::int64_t B = 1;   // Exploration batch size.
  double M = 0.0;       // Concentration relaxation.
  std::int64_t T_R = 0; // Exploitation length; set after exploration.
  double validated_threshold_offset = 0.0;  // (R + p_{i*} L) M / 3.
};

struct ProviderExploration {
  double v_bar = 0.0;
  double l_bar_true = 0.0;
  double l_bar_reported = 0.0;
  double u_bar = 0.0;  // v_bar - p * l_bar_reported.
  double delta = 0.0;  // 2 v_bar / (p L) - 2 l_bar_reported / L.
};

struct ExplorationStats {
  std::vector<ProviderExploration> providers;  // Index i is provider i+1.
};

struct WinnerSelection {
  int i_star = 0;  // 1-based provider id.
  double u_bar_prime = 0.0;
};

struct QueryRecord {
  std::int64_t t = 0;  // 1-based global query index.
  Phase phase = Phase::kExploration;
  int provider = 0;    // 1-based provider id.
  int variant = 0;
  double cost_per_token = 0.0;
  int true_length = 0;
  int reported_length = 0;
  double reward = 0.0;
  double payment = 0.0;  // price * reported_length.

  bool operator==(const QueryRecord&) const = default;
};

struct Transcript {
  std::int64_t budget = 0;  // T of the run.
  std::vector<QueryRecord> records;
  MechanismParams params;
  ExplorationStats stats;
  WinnerSelection winner;
  bool validated = false;
};

// Public bounds the mechanism works with: the largest reward bound and
// output length across the lineup.
struct LineupBounds {
  double R = 0.0;
  int L = 0;
  std::vector<double> prices;
};

LineupBounds BoundsOf(std::span<const ProviderProfile> profiles);

// B = floor(T^{2 eps}) (at least 1), M = T^{-eps} ln(K T). T_R is left 0.
MechanismParams DeriveParams(std::int64_t T, int K, double epsilon);

// Appends K * B exploration records, provider by provider.
ExplorationStats RunExploration(std::span<const ProviderProfile> profiles,
                                std::span<ProviderPolicy* const> policies,
                                const MechanismParams& params, int L,
                                Rng& rng, Transcript& transcript);

// Argmax of u_bar with a uniform random tie-break; u_bar' is the best of
// the rest. Throws ConfigError with fewer than two providers.
WinnerSelection SelectWinner(const ExplorationStats& stats, Rng& rng);

// floor(T - (5K + 2R / (min p L) + sum_{i != i*} delta_i) B - K).
// Throws ConfigError("T too small for chosen epsilon/K") when not positive.
std::int64_t ComputeExploitationLength(std::int64_t T, int K, std::int64_t B,
                                       double R, std::span<const double> prices,
                                       int L, const ExplorationStats& stats,
                                       int i_star);

// The same expression with every delta_i at its upper bound 2R / (p_i L):
// a lower bound on T_R that is known before any delegation.
std::int64_t WorstCaseExploitationLength(std::int64_t T, int K,
                                         std::int64_t B, double R,
                                         std::span<const double> prices,
                                         int L);

// Runs the winner for up to params.T_R queries; returns the validated flag.
// Requires params.validated_threshold_offset to be set.
bool RunExploitation(const WinnerSelection& winner,
                     const MechanismParams& params,
                     std::span<const ProviderProfile> profiles,
                     std::span<ProviderPolicy* const> policies, Rng& rng,
                     Transcript& transcript);

// Number of blind-trust-II queries for credit delta and batch size B:
// floor(B (delta + 3)) plus one Bernoulli(frac) extra, or 0 if delta + 3 < 0.
std::int64_t BlindTrustTwoCount(double delta, std::int64_t B, Rng& rng);

void RunBlindTrust(const WinnerSelection& winner, bool validated,
                   const ExplorationStats& stats,
                   const MechanismParams& params,
                   std::span<const ProviderProfile> profiles,
                   std::span<ProviderPolicy* const> policies, Rng& rng,
                   Transcript& transcript);

// Full run with an explicit decision layer per provider. config.seed seeds
// the run's only RNG. Throws ConfigError before any delegation when T_R
// could be non-positive.
Transcript RunMechanismWithPolicies(const GameConfig& config,
                                    std::span<const ProviderProfile> profiles,
                                    std::span<ProviderPolicy* const> policies);

// Full run with one named strategy per provider.
Transcript RunMechanism(const GameConfig& config,
                        std::span<const ProviderProfile> profiles,
                        std::span<const StrategyKind> strategies);

// Newline-delimited JSON: one summary line, then one line per record.
void WriteTranscript(const Transcript& transcript, std::ostream& out);

}  // namespace delegation

#endif  // DELEGATION_MECHANISM_H_
