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

#include "delegation/mechanism.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "delegation/numeric.h"

namespace delegation {
namespace {

// Floors x, treating values within rounding noise of an integer as that
// integer so exact-looking inputs such as 100 * 2.32 give 232.
double StableFloor(double x) {
  const double r = std::round(x);
  if (std::fabs(x - r) <= 1e-9 * std::max(1.0, std::fabs(x))) return r;
  return std::floor(x);
}

void Delegate(const ProviderProfile& profile, ProviderPolicy& policy,
              Phase phase, std::int64_t index_in_phase,
              std::optional<double> informed, Rng& rng,
              Transcript& transcript) {
  const int variant = policy.ServingVariant(profile, phase);
  const OutcomeSample generated =
      SampleOutcome(profile.variants.at(variant), rng);
  const Observation obs{phase, informed, index_in_phase, generated};
  const Action action = policy.Respond(profile, obs);
  if (action.variant_index != variant ||
      action.reported_length < generated.gen_length ||
      action.reported_length > profile.L) {
    throw std::logic_error("provider policy returned an inconsistent action");
  }
  QueryRecord r;
  r.t = static_cast<std::int64_t>(transcript.records.size()) + 1;
  r.phase = phase;
  r.provider = profile.id;
  r.variant = variant;
  r.cost_per_token = profile.variants[variant].cost_per_token;
  r.true_length = generated.gen_length;
  r.reported_length = action.reported_length;
  r.reward = generated.reward;
  r.payment = profile.price_per_token * action.reported_length;
  transcript.records.push_back(r);
}

double UserUtilityOf(const QueryRecord& r) { return r.reward - r.payment; }

}  // namespace

LineupBounds BoundsOf(std::span<const ProviderProfile> profiles) {
  LineupBounds b;
  for (const ProviderProfile& p : profiles) {
    b.R = std::max(b.R, p.R);
    b.L = std::max(b.L, p.L);
    b.prices.push_back(p.price_per_token);
  }
  return b;
}

MechanismParams DeriveParams(std::int64_t T, int K, double epsilon) {
  MechanismParams params;
  const double t = static_cast<double>(T);
  params.B = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(StableFloor(std::pow(t, 2.0 * epsilon))));
  params.M = std::pow(t, -epsilon) * std::log(static_cast<double>(K) * t);
  return params;
}

ExplorationStats RunExploration(std::span<const ProviderProfile> profiles,
                                std::span<ProviderPolicy* const> policies,
                                const MechanismParams& params, int L,
                                Rng& rng, Transcript& transcript) {
  ExplorationStats stats;
  const double n = static_cast<double>(params.B);
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const ProviderProfile& profile = profiles[i];
    CompensatedSum reward, true_len, reported_len;
    for (std::int64_t j = 1; j <= params.B; ++j) {
      Delegate(profile, *policies[i], Phase::kExploration, j, std::nullopt,
               rng, transcript);
      const QueryRecord& r = transcript.records.back();
      reward.Add(r.reward);
      true_len.Add(r.true_length);
      reported_len.Add(r.reported_length);
    }
    ProviderExploration e;
    const double p = profile.price_per_token;
    e.v_bar = reward.Value() / n;
    e.l_bar_true = true_len.Value() / n;
    e.l_bar_reported = reported_len.Value() / n;
    e.u_bar = e.v_bar - p * e.l_bar_reported;
    e.delta = 2.0 * e.v_bar / (p * L) - 2.0 * e.l_bar_reported / L;
    stats.providers.push_back(e);
  }
  return stats;
}

WinnerSelection SelectWinner(const ExplorationStats& stats, Rng& rng) {
  const auto& ps = stats.providers;
  if (ps.size() < 2) throw ConfigError("winner selection needs K >= 2");
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> argmax;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (ps[i].u_bar > best) {
      best = ps[i].u_bar;
      argmax.assign(1, static_cast<int>(i));
    } else if (ps[i].u_bar == best) {
      argmax.push_back(static_cast<int>(i));
    }
  }
  const int winner =
      argmax.size() == 1 ? argmax[0] : argmax[rng.UniformIndex(argmax.size())];
  double runner_up = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (static_cast<int>(i) != winner) {
      runner_up = std::max(runner_up, ps[i].u_bar);
    }
  }
  return {winner + 1, runner_up};
}

namespace {

std::int64_t ExploitationLengthFor(std::int64_t T, int K, std::int64_t B,
                                   double R, std::span<const double> prices,
                                   int L, double delta_sum) {
  const double min_p = *std::min_element(prices.begin(), prices.end());
  const double coefficient =
      5.0 * K + 2.0 * R / (min_p * L) + delta_sum;
  const double t_r = StableFloor(static_cast<double>(T) -
                                 coefficient * static_cast<double>(B) - K);
  if (!(t_r >= 1.0)) {
    throw ConfigError("T too small for chosen epsilon/K (T_R = " +
                      std::to_string(static_cast<long long>(t_r)) + ")");
  }
  return static_cast<std::int64_t>(t_r);
}

}  // namespace

std::int64_t ComputeExploitationLength(std::int64_t T, int K, std::int64_t B,
                                       double R, std::span<const double> prices,
                                       int L, const ExplorationStats& stats,
                                       int i_star) {
  double delta_sum = 0.0;
  for (std::size_t i = 0; i < stats.providers.size(); ++i) {
    if (static_cast<int>(i) + 1 != i_star) {
      delta_sum += stats.providers[i].delta;
    }
  }
  return ExploitationLengthFor(T, K, B, R, prices, L, delta_sum);
}

std::int64_t WorstCaseExploitationLength(std::int64_t T, int K,
                                         std::int64_t B, double R,
                                         std::span<const double> prices,
                                         int L) {
  // The winner's own credit is excluded; drop the smallest bound so the
  // result holds whichever provider wins.
  std::vector<double> bounds;
  for (double p : prices) bounds.push_back(2.0 * R / (p * L));
  std::sort(bounds.begin(), bounds.end());
  double delta_sum = 0.0;
  for (std::size_t i = 1; i < bounds.size(); ++i) delta_sum += bounds[i];
  return ExploitationLengthFor(T, K, B, R, prices, L, delta_sum);
}

bool RunExploitation(const WinnerSelection& winner,
                     const MechanismParams& params,
                     std::span<const ProviderProfile> profiles,
                     std::span<ProviderPolicy* const> policies, Rng& rng,
                     Transcript& transcript) {
  const std::size_t w = static_cast<std::size_t>(winner.i_star - 1);
  const ProviderProfile& profile = profiles[w];
  const double threshold =
      winner.u_bar_prime - params.validated_threshold_offset;
  CompensatedSum utility;
  for (std::int64_t j = 1; j <= params.T_R; ++j) {
    Delegate(profile, *policies[w], Phase::kExploitation, j,
             winner.u_bar_prime, rng, transcript);
    utility.Add(UserUtilityOf(transcript.records.back()));
    if (j > params.B &&
        utility.Value() / static_cast<double>(j) < threshold) {
      return false;
    }
  }
  return true;
}

std::int64_t BlindTrustTwoCount(double delta, std::int64_t B, Rng& rng) {
  const double credit = delta + 3.0;
  if (credit < 0.0) return 0;
  const double scaled = static_cast<double>(B) * credit;
  const double whole = StableFloor(scaled);
  const double frac = scaled - whole;
  std::int64_t count = static_cast<std::int64_t>(whole);
  if (frac > 0.0 && rng.Bernoulli(frac)) ++count;
  return count;
}

void RunBlindTrust(const WinnerSelection& winner, bool validated,
                   const ExplorationStats& stats,
                   const MechanismParams& params,
                   std::span<const ProviderProfile> profiles,
                   std::span<ProviderPolicy* const> policies, Rng& rng,
                   Transcript& transcript) {
  const std::size_t w = static_cast<std::size_t>(winner.i_star - 1);
  if (validated) {
    for (std::int64_t j = 1; j <= params.B; ++j) {
      Delegate(profiles[w], *policies[w], Phase::kBlindTrust1, j,
               std::nullopt, rng, transcript);
    }
  }
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    if (i == w) continue;
    for (std::int64_t j = 1; j <= params.B; ++j) {
      Delegate(profiles[i], *policies[i], Phase::kBlindTrust1, j,
               std::nullopt, rng, transcript);
    }
  }
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const std::int64_t n =
        BlindTrustTwoCount(stats.providers[i].delta, params.B, rng);
    for (std::int64_t j = 1; j <= n; ++j) {
      Delegate(profiles[i], *policies[i], Phase::kBlindTrust2, j,
               std::nullopt, rng, transcript);
    }
  }
}

Transcript RunMechanismWithPolicies(
    const GameConfig& config, std::span<const ProviderProfile> profiles,
    std::span<ProviderPolicy* const> policies) {
  config.Validate();
  if (static_cast<int>(profiles.size()) != config.K ||
      policies.size() != profiles.size()) {
    throw ConfigError("need exactly one profile and one strategy per provider");
  }
  const LineupBounds bounds = BoundsOf(profiles);
  Transcript transcript;
  transcript.budget = config.T;
  transcript.params = DeriveParams(config.T, config.K, config.epsilon);
  MechanismParams& params = transcript.params;
  WorstCaseExploitationLength(config.T, config.K, params.B, bounds.R,
                              bounds.prices, bounds.L);

  Rng rng(config.seed);
  transcript.records.reserve(static_cast<std::size_t>(config.T));
  transcript.stats =
      RunExploration(profiles, policies, params, bounds.L, rng, transcript);
  transcript.winner = SelectWinner(transcript.stats, rng);
  const WinnerSelection& winner = transcript.winner;
  const std::size_t w = static_cast<std::size_t>(winner.i_star - 1);
  policies[w]->Inform(profiles[w], winner.u_bar_prime);

  params.T_R = ComputeExploitationLength(
      config.T, config.K, params.B, bounds.R, bounds.prices, bounds.L,
      transcript.stats, winner.i_star);
  params.validated_threshold_offset =
      (bounds.R + profiles[w].price_per_token * bounds.L) * params.M / 3.0;
  transcript.validated =
      RunExploitation(winner, params, profiles, policies, rng, transcript);
  RunBlindTrust(winner, transcript.validated, transcript.stats, params,
                profiles, policies, rng, transcript);
  if (static_cast<std::int64_t>(transcript.records.size()) > config.T) {
    throw std::logic_error("mechanism exceeded its query budget");
  }
  return transcript;
}

Transcript RunMechanism(const GameConfig& config,
                        std::span<const ProviderProfile> profiles,
                        std::span<const StrategyKind> strategies) {
  std::vector<NamedPolicy> named;
  named.reserve(strategies.size());
  for (StrategyKind k : strategies) named.emplace_back(k);
  std::vector<ProviderPolicy*> policies;
  for (NamedPolicy& p : named) policies.push_back(&p);
  return RunMechanismWithPolicies(config, profiles, policies);
}

namespace {

class LineWriter {
 public:
  explicit LineWriter(std::string& buf) : buf_(buf) {}

  void Key(const char* key) {
    buf_ += first_ ? "{\"" : ",\"";
    first_ = false;
    buf_ += key;
    buf_ += "\":";
  }
  void Field(const char* key, double v) {
    Key(key);
    char tmp[32];
    auto [ptr, ec] = std::to_chars(tmp, tmp + sizeof(tmp), v);
    buf_.append(tmp, ptr);
  }
  void Field(const char* key, std::int64_t v) {
    Key(key);
    buf_ += std::to_string(v);
  }
  void Field(const char* key, int v) { Field(key, std::int64_t{v}); }
  void Field(const char* key, bool v) {
    Key(key);
    buf_ += v ? "true" : "false";
  }
  void Field(const char* key, const char* v) {
    Key(key);
    buf_ += '"';
    buf_ += v;
    buf_ += '"';
  }
  void End() { buf_ += "}\n"; }

 private:
  std::string& buf_;
  bool first_ = true;
};

}  // namespace

void WriteTranscript(const Transcript& transcript, std::ostream& out) {
  std::string buf;
  {
    LineWriter w(buf);
    w.Field("B", transcript.params.B);
    w.Field("M", transcript.params.M);
    w.Field("T_R", transcript.params.T_R);
    w.Field("i_star", transcript.winner.i_star);
    w.Field("u_bar_prime", transcript.winner.u_bar_prime);
    w.Field("validated", transcript.validated);
    w.Field("records",
            static_cast<std::int64_t>(transcript.records.size()));
    w.End();
  }
  for (const QueryRecord& r : transcript.records) {
    LineWriter w(buf);
    w.Field("t", r.t);
    w.Field("phase", PhaseName(r.phase));
    w.Field("provider", r.provider);
    w.Field("variant", r.variant);
    w.Field("cost_per_token", r.cost_per_token);
    w.Field("true_length", r.true_length);
    w.Field("reported_length", r.reported_length);
    w.Field("reward", r.reward);
    w.Field("payment", r.payment);
    w.End();
    if (buf.size() > (1 << 20)) {
      out << buf;
      buf.clear();
    }
  }
  out << buf;
}

}  // namespace delegation
