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


#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "delegation/config.h"
#include "doctest.h"
#include "json.hpp"
#include "test_util.h"

namespace delegation {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("delegation_config_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  void Write(const std::string& name, const std::string& text) const {
    std::ofstream(path_ / name) << text;
  }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

json MinimalConfig() {
  return json::parse(R"({
    "T": 1000, "K": 2, "epsilon": 0.3, "seed": 1, "gamma": 0,
    "price_scale": 1.0,
    "providers": [
      {"id": 1, "price_per_token": 0.1, "R": 1, "L": 10,
       "variants": [{"name": "a", "cost_per_token": 0.1,
                     "samples_file": "a.csv"}]},
      {"id": 2, "price_per_token": 0.2, "R": 1, "L": 10,
       "variants": [{"name": "b", "cost_per_token": 0.2,
                     "samples_file": "b.csv"}]}
    ]})");
}

void WriteBanks(const TempDir& dir) {
  dir.Write("a.csv", "reward,gen_length\n0.5,3\n1.0,4\n");
  dir.Write("b.csv", "reward,gen_length\n0.25,10\n");
}

TEST_CASE("sample bank parsing") {
  std::istringstream ok("reward,gen_length\n0.5,3\n\n1,7\n");
  const SampleBank bank = ReadSampleBank(ok, "inline");
  REQUIRE(bank.samples.size() == 2);
  CHECK(bank.samples[1] == OutcomeSample{1.0, 7});

  std::istringstream bad_header("r,l\n0.5,3\n");
  CHECK_THROWS_AS(ReadSampleBank(bad_header, "x"), ConfigError);
  std::istringstream bad_row("reward,gen_length\n0.5,three\n");
  CHECK_THROWS_AS(ReadSampleBank(bad_row, "x"), ConfigError);
  std::istringstream fractional("reward,gen_length\n0.5,3.5\n");
  CHECK_THROWS_AS(ReadSampleBank(fractional, "x"), ConfigError);
}

TEST_CASE("minimal config loads and scales prices") {
  TempDir dir;
  WriteBanks(dir);
  json doc = MinimalConfig();
  doc["price_scale"] = 0.5;
  const LoadedConfig cfg = ParseConfig(doc, dir.path());
  REQUIRE(cfg.providers.size() == 2);
  CHECK(cfg.providers[0].price_per_token == 0.05);
  CHECK(cfg.providers[0].variants[0].cost_per_token == 0.05);
  CHECK(cfg.providers[1].variants[0].bank.samples.size() == 1);
  CHECK(cfg.game.T == 1000);
}

TEST_CASE("variants are sorted by cost on load") {
  TempDir dir;
  WriteBanks(dir);
  json doc = MinimalConfig();
  doc["providers"][0]["variants"].push_back(
      {{"name", "cheap"}, {"cost_per_token", 0.05}, {"samples_file", "b.csv"}});
  const LoadedConfig cfg = ParseConfig(doc, dir.path());
  CHECK(cfg.providers[0].variants[0].name == "cheap");
  CHECK(cfg.providers[0].TruthfulIndex() == 1);
}

TEST_CASE("config errors") {
  TempDir dir;
  WriteBanks(dir);
  json doc = MinimalConfig();
  SUBCASE("epsilon at one half") {
    doc["epsilon"] = 0.5;
    CHECK_THROWS_WITH_AS(ParseConfig(doc, dir.path()),
                         "epsilon out of (0, 0.5)", ConfigError);
  }
  SUBCASE("length above L names the sample") {
    dir.Write("b.csv", "reward,gen_length\n0.25,10\n0.25,11\n");
    CHECK_THROWS_WITH_AS(ParseConfig(doc, dir.path()),
                         doctest::Contains("sample 1"), ConfigError);
  }
  SUBCASE("missing sample file") {
    doc["providers"][1]["variants"][0]["samples_file"] = "nope.csv";
    CHECK_THROWS_WITH_AS(ParseConfig(doc, dir.path()),
                         doctest::Contains("missing sample file"),
                         ConfigError);
  }
  SUBCASE("K disagrees with the provider list") {
    doc["K"] = 3;
    CHECK_THROWS_AS(ParseConfig(doc, dir.path()), ConfigError);
  }
  SUBCASE("ids out of order") {
    doc["providers"][0]["id"] = 2;
    CHECK_THROWS_AS(ParseConfig(doc, dir.path()), ConfigError);
  }
  SUBCASE("missing field") {
    doc.erase("T");
    CHECK_THROWS_WITH_AS(ParseConfig(doc, dir.path()),
                         doctest::Contains("'T'"), ConfigError);
  }
  SUBCASE("unparseable file") {
    dir.Write("bad.json", "{ not json");
    CHECK_THROWS_WITH_AS(LoadConfig(dir.path() / "bad.json"),
                         doctest::Contains("parse error"), ConfigError);
  }
}

TEST_CASE("bundled experiment config") {
  const LoadedConfig cfg = LoadConfig(testing::DataPath("experiment.json"));
  CHECK(cfg.game.K == 3);
  CHECK(cfg.game.epsilon == 0.3);
  REQUIRE(cfg.providers.size() == 3);
  for (const ProviderProfile& p : cfg.providers) {
    CHECK(p.L == 38058);
    CHECK(p.variants.size() == 3);
    CHECK(CheckAssumptions(p, cfg.game.gamma).holds);
  }
  CHECK(ComputeBenchmarks(cfg.providers, cfg.game.T).best_id == 1);

  GameConfig big = cfg.game;
  big.T = 1000000;
  CHECK_NOTHROW(big.Validate());
}

TEST_CASE("bundled toy config") {
  const LoadedConfig cfg = LoadConfig(testing::DataPath("toy.json"));
  CHECK(cfg.game.K == 2);
  for (const ProviderProfile& p : cfg.providers) {
    CHECK(CheckAssumptions(p, cfg.game.gamma).holds);
  }
}

}  // namespace
}  // namespace delegation
