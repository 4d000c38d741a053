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


#include <cmath>
#include <sstream>

#include "delegation/accounting.h"
#include "delegation/config.h"
#include "delegation/mechanism.h"
#include "delegation/numeric.h"
#include "delegation/rng.h"
#include "doctest.h"
#include "test_util.h"

namespace delegation {
namespace {

using testing::Profile;
using testing::Singleton;
using testing::Variant;

ExplorationStats StatsWithUtilities(std::vector<double> u) {
  ExplorationStats s;
  for (double x : u) {
    ProviderExploration e;
    e.u_bar = x;
    s.providers.push_back(e);
  }
  return s;
}

std::vector<ProviderPolicy*> Pointers(std::vector<NamedPolicy>& named) {
  std::vector<ProviderPolicy*> out;
  for (NamedPolicy& p : named) out.push_back(&p);
  return out;
}

TEST_CASE("parameter derivation") {
  const MechanismParams a = DeriveParams(1000000, 3, 0.3);
  CHECK(a.B == 3981);
  const double m_ref = std::pow(10.0, -1.8) * (std::log(3.0) + 6 * std::log(10.0));
  CHECK(std::fabs(a.M - m_ref) <= 1e-9 * m_ref);
  CHECK(a.M == doctest::Approx(0.23638).epsilon(1e-4));

  const MechanismParams b = DeriveParams(10000, 2, 0.25);
  CHECK(b.B == 100);
  CHECK(b.M == doctest::Approx(0.1 * std::log(20000.0)).epsilon(1e-12));
  CHECK(b.M == doctest::Approx(0.99035).epsilon(1e-5));

  const MechanismParams c = DeriveParams(1, 1, 0.3);
  CHECK(c.B == 1);
  CHECK(c.M == 0.0);
}

TEST_CASE("exploitation length") {
  ExplorationStats s;
  s.providers.resize(3);
  s.providers[0].delta = 1.9;  // Winner; excluded.
  s.providers[1].delta = -0.68;
  s.providers[2].delta = -0.5;
  const std::vector<double> prices = {0.5, 0.3, 0.4};
  CHECK(ComputeExploitationLength(100000, 3, 100, 1.0, prices, 10, s, 1) ==
        98548);

  ExplorationStats zero;
  zero.providers.resize(3);
  CHECK(ComputeExploitationLength(100000, 3, 100, 0.0, prices, 10, zero, 2) ==
        100000 - 5 * 3 * 100 - 3);

  const MechanismParams p = DeriveParams(1000, 3, 0.4);
  CHECK(p.B == 251);
  CHECK_THROWS_WITH_AS(
      WorstCaseExploitationLength(1000, 3, p.B, 1.0, prices, 10),
      doctest::Contains("T too small for chosen epsilon/K"), ConfigError);
}

TEST_CASE("configuration rejected before any delegation") {
  const std::vector<ProviderProfile> ps = {
      Singleton(1, 0.3, 0.8, 5), Singleton(2, 0.3, 0.6, 4),
      Singleton(3, 0.3, 0.6, 4)};
  const std::vector<StrategyKind> honest(3, StrategyKind::kHonest);
  CHECK_THROWS_AS(RunMechanism(testing::Config(1000, 3, 0.4, 1), ps, honest),
                  ConfigError);
}

TEST_CASE("exploration hand trace") {
  const std::vector<ProviderProfile> ps = {Singleton(1, 0.1, 0.8, 5),
                                           Singleton(2, 0.1, 0.6, 4)};
  std::vector<NamedPolicy> named(2, NamedPolicy(StrategyKind::kHonest));
  const auto policies = Pointers(named);
  MechanismParams params;
  params.B = 2;
  Rng rng(1);
  Transcript t;
  const ExplorationStats s = RunExploration(ps, policies, params, 10, rng, t);
  REQUIRE(t.records.size() == 4);
  CHECK(t.records[0].provider == 1);
  CHECK(t.records[1].provider == 1);
  CHECK(t.records[2].provider == 2);
  CHECK(t.records[3].t == 4);
  CHECK(s.providers[0].u_bar == doctest::Approx(0.3));
  CHECK(s.providers[1].u_bar == doctest::Approx(0.2));
  CHECK(s.providers[0].delta == doctest::Approx(2 * 0.8 / 1.0 - 2 * 5 / 10.0));
  CHECK(s.providers[1].delta == doctest::Approx(2 * 0.6 / 1.0 - 2 * 4 / 10.0));
  CHECK(s.providers[0].l_bar_true == 5.0);
}

TEST_CASE("exploration credit arithmetic") {
  const std::vector<ProviderProfile> ps = {Singleton(1, 0.5, 0.8, 5),
                                           Singleton(2, 0.5, 0.6, 4)};
  std::vector<NamedPolicy> named(2, NamedPolicy(StrategyKind::kHonest));
  MechanismParams params;
  params.B = 3;
  Rng rng(1);
  Transcript t;
  const ExplorationStats s =
      RunExploration(ps, Pointers(named), params, 10, rng, t);
  CHECK(s.providers[0].delta == doctest::Approx(-0.68));
}

TEST_CASE("dishonest-all exploration reports L") {
  const ProviderProfile cheap = Profile(
      1, 0.1,
      {Variant("c", 0.01, {{0.1, 3}}), Variant("f", 0.1, {{0.9, 3}})}, 1.0,
      10);
  const std::vector<ProviderProfile> ps = {cheap, Singleton(2, 0.1, 0.5, 2)};
  std::vector<NamedPolicy> named = {NamedPolicy(StrategyKind::kDishonestAll),
                                    NamedPolicy(StrategyKind::kHonest)};
  MechanismParams params;
  params.B = 4;
  Rng rng(1);
  Transcript t;
  const ExplorationStats s =
      RunExploration(ps, Pointers(named), params, 10, rng, t);
  CHECK(s.providers[0].l_bar_reported == 10.0);
  CHECK(s.providers[0].l_bar_true == 3.0);
  CHECK(s.providers[0].u_bar == doctest::Approx(0.1 - 0.1 * 10));
}

TEST_CASE("winner selection") {
  Rng rng(1);
  SUBCASE("strict order") {
    const WinnerSelection w = SelectWinner(StatsWithUtilities({0.3, 0.2, 0.1}), rng);
    CHECK(w.i_star == 1);
    CHECK(w.u_bar_prime == 0.2);
  }
  SUBCASE("negative utilities") {
    const WinnerSelection w =
        SelectWinner(StatsWithUtilities({-1.7, -1.0, -0.9}), rng);
    CHECK(w.i_star == 3);
    CHECK(w.u_bar_prime == -1.0);
  }
  SUBCASE("ties are broken uniformly") {
    const ExplorationStats tied = StatsWithUtilities({0.3, 0.3});
    const int n = 10000;
    int first = 0;
    for (int i = 0; i < n; ++i) {
      const WinnerSelection w = SelectWinner(tied, rng);
      CHECK(w.u_bar_prime == 0.3);
      first += w.i_star == 1;
    }
    CHECK(std::fabs(first - n / 2.0) <= 3 * std::sqrt(n * 0.25));
  }
  SUBCASE("a single provider is an error") {
    CHECK_THROWS_AS(SelectWinner(StatsWithUtilities({0.3}), rng), ConfigError);
  }
}

TEST_CASE("validated threshold") {
  const std::vector<ProviderProfile> ps = {Singleton(1, 0.3, 1.0, 1),
                                           Singleton(2, 0.3, 0.2, 4),
                                           Singleton(3, 0.3, 0.0, 5)};
  const std::vector<StrategyKind> honest(3, StrategyKind::kHonest);
  const Transcript t =
      RunMechanism(testing::Config(1000000, 3, 0.3, 5), ps, honest);
  CHECK(t.winner.i_star == 1);
  CHECK(t.winner.u_bar_prime == doctest::Approx(-1.0));
  const double threshold =
      t.winner.u_bar_prime - t.params.validated_threshold_offset;
  CHECK(threshold == doctest::Approx(-1.31517).epsilon(1e-5));
  CHECK(t.validated);
  CHECK(static_cast<std::int64_t>(t.records.size()) <= 1000000);
}

TEST_CASE("a breached winner stops at the first check") {
  const ProviderProfile winner = Profile(
      1, 0.01,
      {Variant("c", 0.001, {{0.0, 1}}), Variant("f", 0.01, {{1.0, 1}})}, 1.0,
      10);
  const std::vector<ProviderProfile> ps = {winner, Singleton(2, 0.01, 0.5, 1)};
  const std::vector<StrategyKind> kinds = {StrategyKind::kDishonestModel,
                                           StrategyKind::kHonest};
  const Transcript t = RunMechanism(testing::Config(10000, 2, 0.25, 3), ps, kinds);
  CHECK(t.winner.i_star == 1);
  CHECK_FALSE(t.validated);
  std::int64_t exploit = 0;
  for (const QueryRecord& r : t.records) exploit += r.phase == Phase::kExploitation;
  CHECK(exploit == t.params.B + 1);
}

TEST_CASE("infeasible second-best ends unvalidated") {
  const ProviderProfile winner = Profile(
      1, 0.1,
      {Variant("c", 0.05, {{0.2, 2}}), Variant("f", 0.1, {{0.6, 2}})}, 1.0,
      10);
  const std::vector<ProviderProfile> ps = {winner, Singleton(2, 0.1, 0.6, 1)};
  std::vector<NamedPolicy> named = {NamedPolicy(StrategyKind::kOurs),
                                    NamedPolicy(StrategyKind::kHonest)};
  const auto policies = Pointers(named);
  const WinnerSelection w{1, 0.5};  // Above every variant's h - p g.
  named[0].Inform(ps[0], w.u_bar_prime);
  REQUIRE_FALSE(named[0].plan()->feasible);
  MechanismParams params = DeriveParams(10000, 2, 0.25);
  params.T_R = 5000;
  params.validated_threshold_offset = 0.01;
  Rng rng(1);
  Transcript t;
  CHECK_FALSE(RunExploitation(w, params, ps, policies, rng, t));
  CHECK(static_cast<std::int64_t>(t.records.size()) == params.B + 1);
  CHECK(t.records.back().reported_length == 10);
  CHECK(t.records.back().variant == 0);
}

TEST_CASE("blind trust phase two rounding") {
  Rng rng(9);
  SUBCASE("whole credit draws nothing") {
    Rng fresh(9);
    CHECK(BlindTrustTwoCount(-0.68, 100, rng) == 232);
    CHECK(rng.NextU64() == fresh.NextU64());
  }
  SUBCASE("negative credit") {
    CHECK(BlindTrustTwoCount(-3.5, 100, rng) == 0);
  }
  SUBCASE("fractional credit averages out") {
    const int n = 10000;
    std::int64_t total = 0;
    for (int i = 0; i < n; ++i) {
      const std::int64_t c = BlindTrustTwoCount(-0.675, 100, rng);
      CHECK((c == 232 || c == 233));
      total += c;
    }
    const double mean = static_cast<double>(total) / n;
    CHECK(std::fabs(mean - 232.5) <= 3 * std::sqrt(0.25 / n));
  }
}

void CheckTranscriptShape(const Transcript& t, int K) {
  const std::int64_t B = t.params.B;
  std::array<std::int64_t, 4> counts{};
  int last_phase = 0;
  std::vector<CompensatedSum> paid(K), reported(K);
  for (std::size_t i = 0; i < t.records.size(); ++i) {
    const QueryRecord& r = t.records[i];
    CHECK(r.t == static_cast<std::int64_t>(i) + 1);
    const int ph = static_cast<int>(r.phase);
    CHECK(ph >= last_phase);
    last_phase = ph;
    ++counts[ph];
    CHECK(r.reported_length >= r.true_length);
    paid[r.provider - 1].Add(r.payment);
    reported[r.provider - 1].Add(r.reported_length);
  }
  CHECK(static_cast<std::int64_t>(t.records.size()) <= t.budget);
  CHECK(counts[0] == K * B);
  CHECK(counts[1] <= t.params.T_R);
  if (t.validated) CHECK(counts[1] == t.params.T_R);
  CHECK(counts[2] == B * (K - 1) + (t.validated ? B : 0));
  std::int64_t lo = 0, hi = 0;
  for (const ProviderExploration& e : t.stats.providers) {
    const double credit = e.delta + 3.0;
    if (credit < 0) continue;
    lo += static_cast<std::int64_t>(std::floor(B * credit - 1e-9));
    hi += static_cast<std::int64_t>(std::ceil(B * credit + 1e-9));
  }
  CHECK(counts[3] >= lo);
  CHECK(counts[3] <= hi);
  return;
}

TEST_CASE("end-to-end runs keep the transcript invariants") {
  const LoadedConfig cfg = LoadConfig(testing::DataPath("experiment.json"));
  Rng pick(4);
  for (int trial = 0; trial < 12; ++trial) {
    std::vector<StrategyKind> kinds;
    for (int i = 0; i < 3; ++i) {
      kinds.push_back(kAllStrategies[pick.UniformIndex(6)]);
    }
    GameConfig g = cfg.game;
    g.seed = 100 + trial;
    const Transcript t = RunMechanism(g, cfg.providers, kinds);
    CheckTranscriptShape(t, 3);
    for (int i = 0; i < 3; ++i) {
      CompensatedSum paid, reported;
      for (const QueryRecord& r : t.records) {
        if (r.provider != i + 1) continue;
        CHECK(r.payment == cfg.providers[i].price_per_token * r.reported_length);
        paid.Add(r.payment);
        reported.Add(r.reported_length);
      }
      const double expect = cfg.providers[i].price_per_token * reported.Value();
      CHECK(std::fabs(paid.Value() - expect) <= 1e-9 * std::fabs(expect));
    }
  }
}

TEST_CASE("two honest providers validate within budget") {
  const LoadedConfig cfg = LoadConfig(testing::DataPath("toy.json"));
  GameConfig g = cfg.game;
  g.T = 10000;
  const std::vector<StrategyKind> honest(2, StrategyKind::kHonest);
  const Transcript t = RunMechanism(g, cfg.providers, honest);
  CHECK(t.validated);
  CheckTranscriptShape(t, 2);
}

TEST_CASE("all dishonest providers still produce a winner") {
  const LoadedConfig cfg = LoadConfig(testing::DataPath("experiment.json"));
  const std::vector<StrategyKind> kinds(3, StrategyKind::kDishonestAll);
  const Transcript t = RunMechanism(cfg.game, cfg.providers, kinds);
  CHECK(t.winner.i_star >= 1);
  CheckTranscriptShape(t, 3);
}

TEST_CASE("same seed gives a byte-identical export") {
  const LoadedConfig cfg = LoadConfig(testing::DataPath("experiment.json"));
  const std::vector<StrategyKind> kinds = {StrategyKind::kOurs,
                                           StrategyKind::kDishonestLength,
                                           StrategyKind::kHonest};
  std::ostringstream a, b, c;
  WriteTranscript(RunMechanism(cfg.game, cfg.providers, kinds), a);
  WriteTranscript(RunMechanism(cfg.game, cfg.providers, kinds), b);
  CHECK(a.str() == b.str());
  GameConfig other = cfg.game;
  other.seed += 1;
  WriteTranscript(RunMechanism(other, cfg.providers, kinds), c);
  CHECK(a.str() != c.str());
  CHECK(a.str().rfind("{\"B\":", 0) == 0);
}

}  // namespace
}  // namespace delegation
