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

#include "cli.h"
#include "doctest.h"
#include "test_util.h"

namespace delegation {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result Run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

const std::string kExperiment = testing::DataPath("experiment.json");
const std::string kToy = testing::DataPath("toy.json");

TEST_CASE("check on the bundled lineups") {
  const Result r = Run({"check", "--config", kExperiment, "--strict"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("assumptions hold") != std::string::npos);
}

TEST_CASE("strict check fails on a violating lineup") {
  const fs::path dir = fs::temp_directory_path() /
                       ("delegation_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::ofstream(dir / "a.csv") << "reward,gen_length\n8,3\n";
  std::ofstream(dir / "b.csv") << "reward,gen_length\n10,3\n";
  std::ofstream(dir / "c.csv") << "reward,gen_length\n1,1\n";
  std::ofstream(dir / "cfg.json") << R"({
    "T": 1000, "K": 2, "epsilon": 0.3, "seed": 1, "gamma": 1,
    "price_scale": 1,
    "providers": [
      {"id": 1, "price_per_token": 2, "R": 10, "L": 5,
       "variants": [
         {"name": "cheap", "cost_per_token": 1, "samples_file": "a.csv"},
         {"name": "full", "cost_per_token": 2, "samples_file": "b.csv"}]},
      {"id": 2, "price_per_token": 1, "R": 10, "L": 5,
       "variants": [
         {"name": "only", "cost_per_token": 1, "samples_file": "c.csv"}]}
    ]})";
  const std::string cfg = (dir / "cfg.json").string();
  const Result strict = Run({"check", "--config", cfg, "--strict"});
  CHECK(strict.code == kExitAssumptionFailure);
  CHECK(strict.out.find("provider 1") != std::string::npos);
  const Result lax = Run({"check", "--config", cfg});
  CHECK(lax.code == kExitOk);
  fs::remove_all(dir);
}

TEST_CASE("run rejects a budget exhausted by exploration") {
  const Result r =
      Run({"run", "--config", kExperiment, "--T", "100", "--epsilon", "0.4"});
  CHECK(r.code == kExitConfigError);
  CHECK(r.err.find("T too small for chosen epsilon/K") != std::string::npos);
}

TEST_CASE("configuration errors exit with code 2") {
  CHECK(Run({"bench", "--config", "/nonexistent/cfg.json"}).code ==
        kExitConfigError);
  CHECK(Run({"run", "--config", kToy, "--epsilon", "0.5"}).code ==
        kExitConfigError);
  CHECK(Run({"run", "--config", kToy, "--strategies", "ours,greedy"}).code ==
        kExitConfigError);
}

TEST_CASE("usage errors exit with code 64") {
  CHECK(Run({"frobnicate"}).code == kExitUsage);
  CHECK(Run({"run", "--config", kToy, "--bogus"}).code == kExitUsage);
  CHECK(Run({"run"}).code == kExitUsage);
  CHECK(Run({}).code == kExitUsage);
}

TEST_CASE("bench prints both benchmarks") {
  const Result r = Run({"bench", "--config", kExperiment});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("u_FB=") != std::string::npos);
  CHECK(r.out.find("u_SB=") != std::string::npos);
  CHECK(r.out.find("best_provider=1") != std::string::npos);
}

TEST_CASE("run writes a report") {
  const Result r = Run({"run", "--config", kToy, "--strategies",
                        "ours,honest", "--json"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("user_total") != std::string::npos);
}

}  // namespace
}  // namespace delegation
