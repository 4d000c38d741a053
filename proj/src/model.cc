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

#include "delegation/model.h"

#include <cmath>
#include <sstream>

#include "delegation/numeric.h"

namespace delegation {
namespace {

std::string ProviderLabel(const ProviderProfile& p) {
  return "provider " + std::to_string(p.id);
}

}  // namespace

void GameConfig::Validate() const {
  if (T < 1) throw ConfigError("T must be a positive integer");
  if (K < 2) throw ConfigError("K must be at least 2");
  if (!(epsilon > 0.0 && epsilon < 0.5)) {
    throw ConfigError("epsilon out of (0, 0.5)");
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw ConfigError("gamma must be a non-negative real");
  }
  if (!(price_scale > 0.0) || !std::isfinite(price_scale)) {
    throw ConfigError("price_scale must be positive");
  }
}

int ProviderProfile::TruthfulIndex() const {
  for (int m = static_cast<int>(variants.size()) - 1; m >= 0; --m) {
    if (variants[m].cost_per_token == price_per_token) return m;
  }
  return static_cast<int>(variants.size()) - 1;
}

void ProviderProfile::Validate() const {
  const std::string who = ProviderLabel(*this);
  if (!(price_per_token > 0.0) || !std::isfinite(price_per_token)) {
    throw ConfigError(who + ": price_per_token must be positive");
  }
  if (!(R > 0.0) || !std::isfinite(R)) {
    throw ConfigError(who + ": R must be positive");
  }
  if (L < 1) throw ConfigError(who + ": L must be at least 1");
  if (variants.empty()) throw ConfigError(who + ": no model variants");

  int truthful = 0;
  for (std::size_t m = 0; m < variants.size(); ++m) {
    const ModelVariant& v = variants[m];
    const std::string vname = who + " variant '" + v.name + "'";
    if (!(v.cost_per_token >= 0.0) || v.cost_per_token > price_per_token) {
      throw ConfigError(vname + ": cost_per_token must lie in [0, price]");
    }
    if (m > 0 && !(v.cost_per_token > variants[m - 1].cost_per_token)) {
      throw ConfigError(vname +
                        ": cost_per_token not strictly increasing in lineup");
    }
    if (v.cost_per_token == price_per_token) ++truthful;
    if (v.bank.samples.empty()) {
      throw ConfigError(vname + ": empty sample bank");
    }
    for (std::size_t s = 0; s < v.bank.samples.size(); ++s) {
      const OutcomeSample& o = v.bank.samples[s];
      if (!(o.reward >= 0.0 && o.reward <= R)) {
        std::ostringstream os;
        os << vname << ": sample " << s << " of '" << v.bank.source_id
           << "' has reward " << o.reward << " outside [0, R=" << R << "]";
        throw ConfigError(os.str());
      }
      if (o.gen_length < 1 || o.gen_length > L) {
        std::ostringstream os;
        os << vname << ": sample " << s << " of '" << v.bank.source_id
           << "' has gen_length " << o.gen_length << " outside [1, L=" << L
           << "]";
        throw ConfigError(os.str());
      }
    }
  }
  if (truthful != 1) {
    throw ConfigError(who +
                      ": exactly one variant must cost the advertised price");
  }
}

VariantStats ExpectedStats(const ModelVariant& variant) {
  CompensatedSum reward, length;
  for (const OutcomeSample& o : variant.bank.samples) {
    reward.Add(o.reward);
    length.Add(static_cast<double>(o.gen_length));
  }
  const double n = static_cast<double>(variant.bank.samples.size());
  return {reward.Value() / n, length.Value() / n};
}

std::vector<VariantStats> CostPerformance(const ProviderProfile& profile) {
  std::vector<VariantStats> out;
  out.reserve(profile.variants.size());
  for (const ModelVariant& v : profile.variants) {
    out.push_back(ExpectedStats(v));
  }
  return out;
}

OutcomeSample SampleOutcome(const ModelVariant& variant, Rng& rng) {
  return variant.bank.samples[rng.UniformIndex(variant.bank.samples.size())];
}

const char* AssumptionConditionName(AssumptionCondition c) {
  switch (c) {
    case AssumptionCondition::kUserUtilityGrowth:
      return "user-utility-growth";
    case AssumptionCondition::kRewardOutpacesCost:
      return "reward-outpaces-cost";
  }
  return "unknown";
}

AssumptionReport CheckAssumptions(const ProviderProfile& profile,
                                  double gamma) {
  if (profile.variants.size() < 2) {
    throw ConfigError("assumption check needs a lineup");
  }
  const std::vector<VariantStats> stats = CostPerformance(profile);
  const double p = profile.price_per_token;
  AssumptionReport report;
  for (std::size_t m = 1; m < stats.size(); ++m) {
    const double c1 = profile.variants[m - 1].cost_per_token;
    const double c2 = profile.variants[m].cost_per_token;
    const VariantStats& lo = stats[m - 1];
    const VariantStats& hi = stats[m];

    const double growth =
        (hi.expected_reward - lo.expected_reward) -
        p * (hi.expected_length - lo.expected_length) - gamma * (c2 - c1);
    if (!(growth >= 0.0)) {
      report.violations.push_back({profile.id, static_cast<int>(m - 1),
                                   static_cast<int>(m),
                                   AssumptionCondition::kUserUtilityGrowth,
                                   growth});
    }
    const double net = (hi.expected_reward - c2 * hi.expected_length) -
                       (lo.expected_reward - c1 * lo.expected_length);
    if (!(net >= 0.0)) {
      report.violations.push_back({profile.id, static_cast<int>(m - 1),
                                   static_cast<int>(m),
                                   AssumptionCondition::kRewardOutpacesCost,
                                   net});
    }
  }
  report.holds = report.violations.empty();
  return report;
}

double TruthfulUtility(const ProviderProfile& profile) {
  const VariantStats s =
      ExpectedStats(profile.variants[profile.TruthfulIndex()]);
  return s.expected_reward - profile.price_per_token * s.expected_length;
}

Benchmarks ComputeBenchmarks(std::span<const ProviderProfile> profiles,
                             std::int64_t T) {
  if (profiles.size() < 2) throw ConfigError("second-best undefined");
  std::vector<double> per_query;
  per_query.reserve(profiles.size());
  for (const ProviderProfile& p : profiles) {
    per_query.push_back(TruthfulUtility(p));
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < per_query.size(); ++i) {
    if (per_query[i] > per_query[best]) best = i;
  }
  bool have_second = false;
  double second = 0.0;
  for (std::size_t i = 0; i < per_query.size(); ++i) {
    if (i == best) continue;
    if (!have_second || per_query[i] > second) {
      second = per_query[i];
      have_second = true;
    }
  }
  const double t = static_cast<double>(T);
  return {t * per_query[best], t * second, profiles[best].id};
}

}  // namespace delegation
