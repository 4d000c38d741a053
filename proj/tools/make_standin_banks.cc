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

// Writes synthetic outcome banks standing in for recorded model outputs.
//
// Rewards are partial-credit scores k/10 with k ~ Binomial(10, mean); lengths
// are log-normal around the target mean, clipped to [1, L]. Output is
// deterministic for a given seed.
//
//   make_standin_banks OUT_DIR [--seed N]

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

namespace {

struct BankSpec {
  std::string file;
  double mean_reward;
  double mean_length;
  double length_sigma;
  int L;
  int samples;
  bool pin_max_length;  // Force one sample to exactly L.
};

class Source {
 public:
  explicit Source(std::uint64_t seed) : engine_(seed) {}
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double Normal() {
    const double u1 = std::max(Uniform(), 1e-300);
    const double u2 = Uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::mt19937_64 engine_;
};

void WriteBank(const std::filesystem::path& dir, const BankSpec& spec,
               Source& src) {
  std::ofstream out(dir / spec.file);
  out << "reward,gen_length\n";
  const double mu =
      std::log(spec.mean_length) - 0.5 * spec.length_sigma * spec.length_sigma;
  for (int s = 0; s < spec.samples; ++s) {
    int hits = 0;
    for (int k = 0; k < 10; ++k) hits += src.Uniform() < spec.mean_reward;
    const double reward = hits / 10.0;
    double len = std::exp(mu + spec.length_sigma * src.Normal());
    len = std::clamp(std::round(len), 1.0, static_cast<double>(spec.L));
    int length = static_cast<int>(len);
    if (spec.pin_max_length && s == 0) length = spec.L;
    out << reward << ',' << length << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: make_standin_banks OUT_DIR [--seed N]\n";
    return 64;
  }
  std::uint64_t seed = 20260101;
  for (int i = 2; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--seed") seed = std::stoull(argv[i + 1]);
  }
  const std::filesystem::path dir = argv[1];
  std::filesystem::create_directories(dir / "experiment");
  std::filesystem::create_directories(dir / "toy");

  constexpr int kL = 38058;
  const std::vector<BankSpec> experiment = {
      {"experiment/p1_budget.csv", 0.40, 6000, 0.6, kL, 2000, true},
      {"experiment/p1_mid.csv", 0.65, 5500, 0.6, kL, 2000, false},
      {"experiment/p1_flagship.csv", 0.90, 5000, 0.6, kL, 2000, false},
      {"experiment/p2_budget.csv", 0.30, 4000, 0.6, kL, 2000, false},
      {"experiment/p2_mid.csv", 0.45, 4500, 0.6, kL, 2000, false},
      {"experiment/p2_flagship.csv", 0.62, 5000, 0.6, kL, 2000, false},
      {"experiment/p3_budget.csv", 0.40, 3000, 0.6, kL, 2000, false},
      {"experiment/p3_mid.csv", 0.55, 3500, 0.6, kL, 2000, false},
      {"experiment/p3_flagship.csv", 0.80, 4000, 0.6, kL, 2000, false},
  };
  constexpr int kToyL = 40;
  const std::vector<BankSpec> toy = {
      {"toy/a_budget.csv", 0.35, 6, 0.25, kToyL, 500, false},
      {"toy/a_mid.csv", 0.60, 5, 0.25, kToyL, 500, false},
      {"toy/a_flagship.csv", 0.90, 4, 0.25, kToyL, 500, false},
      {"toy/b_budget.csv", 0.30, 5, 0.25, kToyL, 500, false},
      {"toy/b_mid.csv", 0.45, 4.5, 0.25, kToyL, 500, false},
      {"toy/b_flagship.csv", 0.65, 4, 0.25, kToyL, 500, false},
  };
  Source src(seed);
  for (const BankSpec& spec : experiment) WriteBank(dir, spec, src);
  for (const BankSpec& spec : toy) WriteBank(dir, spec, src);
  return 0;
}
