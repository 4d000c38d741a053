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

#include "delegation/oracle.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "delegation/accounting.h"
#include "delegation/numeric.h"

namespace delegation {

int TablePolicy::ServingVariant(const ProviderProfile&, Phase phase) const {
  return table_[static_cast<std::size_t>(phase)].variant;
}

Action TablePolicy::Respond(const ProviderProfile& profile,
                            const Observation& obs) const {
  const PhasePlay& play = table_[static_cast<std::size_t>(obs.phase)];
  const int generated = obs.generated.gen_length;
  if (play.report.kind == ReportRule::Kind::kTruthful) {
    return {play.variant, generated};
  }
  const int pad = std::clamp(play.report.length, 1, profile.L);
  return {play.variant, std::max(pad, generated)};
}

std::string GridPointLabel(const GridPoint& point) {
  if (const auto* k = std::get_if<StrategyKind>(&point)) {
    return StrategyName(*k);
  }
  const PhaseTable& table = std::get<PhaseTable>(point);
  std::string out;
  for (std::size_t ph = 0; ph < table.size(); ++ph) {
    if (ph > 0) out += '|';
    out += PhaseName(kAllPhases[ph]);
    out += ":v" + std::to_string(table[ph].variant);
    out += table[ph].report.kind == ReportRule::Kind::kTruthful
               ? std::string("/truthful")
               : "/pad" + std::to_string(table[ph].report.length);
  }
  return out;
}

std::vector<int> EvenReportLengths(const ProviderProfile& profile, int count) {
  double min_g = std::numeric_limits<double>::infinity();
  for (const VariantStats& s : CostPerformance(profile)) {
    min_g = std::min(min_g, s.expected_length);
  }
  const double lo = std::ceil(min_g);
  const double hi = profile.L;
  std::vector<int> out;
  for (int k = 1; k <= count; ++k) {
    const int l =
        static_cast<int>(std::lround(lo + k * (hi - lo) / (count + 1)));
    if (l >= 1 && l < profile.L &&
        (out.empty() || out.back() != l)) {
      out.push_back(l);
    }
  }
  return out;
}

StrategyGrid BuildStrategyGrid(const ProviderProfile& profile,
                               std::span<const int> report_lengths) {
  const int n_variants = static_cast<int>(profile.variants.size());
  const ReportRule truthful{ReportRule::Kind::kTruthful, 0};
  const ReportRule full{ReportRule::Kind::kPadTo, profile.L};

  std::vector<PhasePlay> simple;
  for (int v = 0; v < n_variants; ++v) {
    simple.push_back({v, truthful});
    simple.push_back({v, full});
  }
  std::vector<PhasePlay> exploit;
  for (int v = 0; v < n_variants; ++v) {
    exploit.push_back({v, truthful});
    for (int l : report_lengths) {
      exploit.push_back({v, {ReportRule::Kind::kPadTo, l}});
    }
    exploit.push_back({v, full});
  }
  StrategyGrid grid;
  for (const PhasePlay& e : simple) {
    for (const PhasePlay& x : exploit) {
      for (const PhasePlay& b1 : simple) {
        for (const PhasePlay& b2 : simple) {
          grid.points.push_back(PhaseTable{e, x, b1, b2});
        }
      }
    }
  }
  for (StrategyKind k : kAllStrategies) grid.points.push_back(k);
  return grid;
}

double DominanceBound(double C, std::int64_t T, double epsilon) {
  const double t = static_cast<double>(T);
  return C * std::pow(t, 1.0 - epsilon) * std::log(t);
}

double FocalUtility(const GameConfig& config,
                    std::span<const ProviderProfile> profiles, int focal,
                    std::span<const StrategyKind> assignment,
                    const GridPoint& point,
                    std::span<const std::uint64_t> seeds) {
  CompensatedSum total;
  for (std::uint64_t seed : seeds) {
    std::vector<NamedPolicy> named;
    named.reserve(assignment.size());
    for (StrategyKind k : assignment) named.emplace_back(k);
    std::vector<ProviderPolicy*> policies;
    for (NamedPolicy& p : named) policies.push_back(&p);

    NamedPolicy focal_named(StrategyKind::kHonest);
    std::optional<TablePolicy> focal_table;
    if (const auto* k = std::get_if<StrategyKind>(&point)) {
      focal_named = NamedPolicy(*k);
      policies[focal - 1] = &focal_named;
    } else {
      focal_table.emplace(std::get<PhaseTable>(point));
      policies[focal - 1] = &*focal_table;
    }
    GameConfig c = config;
    c.seed = seed;
    const Transcript t = RunMechanismWithPolicies(c, profiles, policies);
    total.Add(ProviderUtility(t, focal));
  }
  return total.Value() / static_cast<double>(seeds.size());
}

DominanceReport BestResponseSearch(const GameConfig& config,
                                   std::span<const ProviderProfile> profiles,
                                   int focal,
                                   std::span<const StrategyKind> opponents,
                                   const StrategyGrid& grid,
                                   std::span<const std::uint64_t> seeds,
                                   StrategyKind named, double C,
                                   std::size_t cap, int workers) {
  if (grid.points.size() > cap) {
    throw ConfigError("strategy grid has " +
                      std::to_string(grid.points.size()) +
                      " points, above the cap of " + std::to_string(cap));
  }
  if (focal < 1 || focal > static_cast<int>(profiles.size())) {
    throw ConfigError("focal provider out of range");
  }
  if (seeds.empty()) throw ConfigError("best-response search needs seeds");

  std::vector<double> utility(grid.points.size());
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= grid.points.size()) return;
      utility[i] = FocalUtility(config, profiles, focal, opponents,
                                grid.points[i], seeds);
    }
  };
  int n_workers = workers > 0
                      ? workers
                      : static_cast<int>(std::thread::hardware_concurrency());
  n_workers = std::max(1, n_workers);
  if (n_workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }

  DominanceReport report;
  report.focal = focal;
  report.named = named;
  report.opponents.assign(opponents.begin(), opponents.end());
  report.seeds.assign(seeds.begin(), seeds.end());
  report.named_utility = FocalUtility(config, profiles, focal, opponents,
                                      GridPoint{named}, seeds);
  std::size_t best = 0;
  for (std::size_t i = 1; i < utility.size(); ++i) {
    if (utility[i] > utility[best]) best = i;
  }
  report.grid_max_utility = report.named_utility;
  report.best_point = StrategyName(named);
  if (!utility.empty() && utility[best] > report.named_utility) {
    report.grid_max_utility = utility[best];
    report.best_point = GridPointLabel(grid.points[best]);
  }
  report.margin = report.grid_max_utility - report.named_utility;
  report.T = config.T;
  report.epsilon = config.epsilon;
  report.C = C;
  report.bound = DominanceBound(C, config.T, config.epsilon);
  report.grid_size = grid.points.size();
  return report;
}

DominanceReport WorstCaseDominance(
    const GameConfig& config, std::span<const ProviderProfile> profiles,
    int focal, std::span<const std::vector<StrategyKind>> opponent_sets,
    const StrategyGrid& grid, std::span<const std::uint64_t> seeds,
    StrategyKind named, double C, std::size_t cap, int workers) {
  if (opponent_sets.empty()) throw ConfigError("no opponent assignments");
  DominanceReport worst;
  bool first = true;
  for (const auto& opponents : opponent_sets) {
    DominanceReport r = BestResponseSearch(config, profiles, focal, opponents,
                                           grid, seeds, named, C, cap,
                                           workers);
    if (first || r.margin > worst.margin) worst = std::move(r);
    first = false;
  }
  return worst;
}

nlohmann::json DominanceToJson(const DominanceReport& r) {
  using nlohmann::json;
  json opponents = json::array();
  for (std::size_t i = 0; i < r.opponents.size(); ++i) {
    opponents.push_back(static_cast<int>(i) + 1 == r.focal
                            ? json(nullptr)
                            : json(StrategyName(r.opponents[i])));
  }
  return json{{"focal", r.focal},
              {"named_strategy", StrategyName(r.named)},
              {"opponents", opponents},
              {"seeds", r.seeds},
              {"named_utility", r.named_utility},
              {"grid_max_utility", r.grid_max_utility},
              {"best_point", r.best_point},
              {"margin", r.margin},
              {"T", r.T},
              {"epsilon", r.epsilon},
              {"C", r.C},
              {"bound", r.bound},
              {"within_bound", r.margin <= r.bound},
              {"grid_size", r.grid_size}};
}

FailureRate ValidatedFailureRate(const GameConfig& config,
                                 std::span<const ProviderProfile> profiles,
                                 std::span<const StrategyKind> strategies,
                                 int runs) {
  if (runs < 30) throw ConfigError("insufficient replications");
  FailureRate out;
  out.runs = runs;
  for (int r = 0; r < runs; ++r) {
    GameConfig c = config;
    c.seed = config.seed + MixSeed(static_cast<std::uint64_t>(r));
    const Transcript t = RunMechanism(c, profiles, strategies);
    if (!t.validated) ++out.failures;
  }
  const double n = static_cast<double>(runs);
  out.rate = static_cast<double>(out.failures) / n;
  const double z = 1.959963984540054;
  const double denom = 1.0 + z * z / n;
  const double center = (out.rate + z * z / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(out.rate * (1.0 - out.rate) / n + z * z / (4.0 * n * n)) /
      denom;
  out.ci_low = std::max(0.0, center - half);
  out.ci_high = std::min(1.0, center + half);
  return out;
}

}  // namespace delegation
