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

#ifndef DELEGATION_ACCOUNTING_H_
#define DELEGATION_ACCOUNTING_H_

#include <array>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "delegation/mechanism.h"
#include "delegation/model.h"
#include "json.hpp"

namespace delegation {

struct UtilityLine {
  int provider = 0;
  double provider_utility = 0.0;
  std::int64_t delegations = 0;
  double user_utility = 0.0;  // User utility earned from this provider.
};

struct UtilityReport {
  double user_total = 0.0;
  std::vector<UtilityLine> per_provider;
  // per_phase[phase][i] for phases in kAllPhases order.
  std::array<std::vector<UtilityLine>, 4> per_phase;
  double u_fb = 0.0;
  double u_sb = 0.0;
  double gap_to_sb = 0.0;  // u_sb - user_total.
};

// Sum of reward - payment over every record.
double UserUtility(const Transcript& transcript);

// Sum of price * reported - cost * true over the records of provider `id`.
// Throws std::out_of_range for ids outside the run's lineup.
double ProviderUtility(const Transcript& transcript, int id);

// Per-provider and per-phase breakdown plus benchmark gap. Benchmarks use
// the transcript's budget.
UtilityReport MakeReport(const Transcript& transcript,
                         std::span<const ProviderProfile> profiles);

// Flat CSV with a header line and one data line.
void WriteReportCsv(const UtilityReport& report, std::ostream& out);
nlohmann::json ReportToJson(const UtilityReport& report);

}  // namespace delegation

#endif  // DELEGATION_ACCOUNTING_H_
