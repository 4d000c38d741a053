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


#ifndef DELEGATION_TESTS_TEST_UTIL_H_
#define DELEGATION_TESTS_TEST_UTIL_H_

#include <string>
#include <utility>
#include <vector>

#include "delegation/model.h"

namespace delegation::testing {

inline ModelVariant Variant(std::string name, double cost,
                            std::vector<OutcomeSample> samples) {
  ModelVariant v;
  v.bank.source_id = name;
  v.name = std::move(name);
  v.cost_per_token = cost;
  v.bank.samples = std::move(samples);
  return v;
}

inline ProviderProfile Profile(int id, double price,
                               std::vector<ModelVariant> variants,
                               double R = 1.0, int L = 10) {
  ProviderProfile p;
  p.id = id;
  p.price_per_token = price;
  p.variants = std::move(variants);
  p.R = R;
  p.L = L;
  return p;
}

// A single full-price variant that always produces the same outcome.
inline ProviderProfile Singleton(int id, double price, double reward,
                                 int length, int L = 10) {
  return Profile(id, price,
                 {Variant("p" + std::to_string(id), price,
                          {{reward, length}})},
                 1.0, L);
}

inline GameConfig Config(std::int64_t T, int K, double epsilon,
                         std::uint64_t seed) {
  GameConfig c;
  c.T = T;
  c.K = K;
  c.epsilon = epsilon;
  c.seed = seed;
  c.price_scale = 1.0;
  return c;
}

inline std::string DataPath(const std::string& rel) {
  return std::string(DELEGATION_DATA_DIR) + "/" + rel;
}

}  // namespace delegation::testing

#endif  // DELEGATION_TESTS_TEST_UTIL_H_
