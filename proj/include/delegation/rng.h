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

#ifndef DELEGATION_RNG_H_
#define DELEGATION_RNG_H_

#include <cstddef>
#include <cstdint>
#include <random>

namespace delegation {

// Seeded generator with platform-independent draws. The engine is
// std::mt19937_64, whose output sequence is fixed by the standard; the
// distributions below are implemented here because the standard library's
// distributions are allowed to differ between implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }

  // Uniform integer in [0, n). Requires n > 0.
  std::size_t UniformIndex(std::size_t n);

  // Uniform double in [0, 1) with 53 random bits.
  double UniformDouble();

  // True with probability p (p clamped to [0, 1]).
  bool Bernoulli(double p);

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer; used to derive independent seeds.
std::uint64_t MixSeed(std::uint64_t x);

}  // namespace delegation

#endif  // DELEGATION_RNG_H_
