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

#include "delegation/numeric.h"

#include <cassert>

namespace delegation {

double SampleStddev(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double mean = Mean(xs);
  CompensatedSum ss;
  for (double x : xs) ss.Add((x - mean) * (x - mean));
  return std::sqrt(ss.Value() / static_cast<double>(xs.size() - 1));
}

LinearFit FitLine(std::span<const double> xs, std::span<const double> ys) {
  assert(xs.size() == ys.size() && xs.size() >= 2);
  const double mx = Mean(xs);
  const double my = Mean(ys);
  CompensatedSum sxx, sxy, syy;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx.Add(dx * dx);
    sxy.Add(dx * dy);
    syy.Add(dy * dy);
  }
  LinearFit fit;
  fit.slope = sxx.Value() > 0.0 ? sxy.Value() / sxx.Value() : 0.0;
  fit.intercept = my - fit.slope * mx;
  if (syy.Value() > 0.0 && sxx.Value() > 0.0) {
    fit.r_squared = sxy.Value() * sxy.Value() / (sxx.Value() * syy.Value());
  } else {
    fit.r_squared = 1.0;
  }
  return fit;
}

}  // namespace delegation
