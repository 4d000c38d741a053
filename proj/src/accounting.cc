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

#include "delegation/accounting.h"

#include <algorithm>
#include <stdexcept>

#include "delegation/numeric.h"

namespace delegation {
namespace {

int ProviderCount(const Transcript& transcript) {
  if (!transcript.stats.providers.empty()) {
    return static_cast<int>(transcript.stats.providers.size());
  }
  int k = 0;
  for (const QueryRecord& r : transcript.records) k = std::max(k, r.provider);
  return k;
}

double ProviderTerm(const QueryRecord& r) {
  return r.payment - r.cost_per_token * r.true_length;
}

double UserTerm(const QueryRecord& r) { return r.reward - r.payment; }

std::size_t PhaseSlot(Phase phase) {
  return static_cast<std::size_t>(phase);
}

}  // namespace

double UserUtility(const Transcript& transcript) {
  CompensatedSum sum;
  for (const QueryRecord& r : transcript.records) sum.Add(UserTerm(r));
  return sum.Value();
}

double ProviderUtility(const Transcript& transcript, int id) {
  if (id < 1 || id > ProviderCount(transcript)) {
    throw std::out_of_range("unknown provider id " + std::to_string(id));
  }
  CompensatedSum sum;
  for (const QueryRecord& r : transcript.records) {
    if (r.provider == id) sum.Add(ProviderTerm(r));
  }
  return sum.Value();
}

UtilityReport MakeReport(const Transcript& transcript,
                         std::span<const ProviderProfile> profiles) {
  const int k = std::max<int>(ProviderCount(transcript),
                              static_cast<int>(profiles.size()));
  std::vector<CompensatedSum> provider(k), user(k);
  std::array<std::vector<CompensatedSum>, 4> phase_provider, phase_user;
  UtilityReport report;
  for (std::size_t ph = 0; ph < 4; ++ph) {
    phase_provider[ph].resize(k);
    phase_user[ph].resize(k);
    report.per_phase[ph].resize(k);
  }
  report.per_provider.resize(k);
  for (int i = 0; i < k; ++i) {
    report.per_provider[i].provider = i + 1;
    for (auto& lines : report.per_phase) lines[i].provider = i + 1;
  }
  for (const QueryRecord& r : transcript.records) {
    const std::size_t i = static_cast<std::size_t>(r.provider - 1);
    const std::size_t ph = PhaseSlot(r.phase);
    const double pu = ProviderTerm(r);
    const double uu = UserTerm(r);
    provider[i].Add(pu);
    user[i].Add(uu);
    phase_provider[ph][i].Add(pu);
    phase_user[ph][i].Add(uu);
    ++report.per_provider[i].delegations;
    ++report.per_phase[ph][i].delegations;
  }
  for (int i = 0; i < k; ++i) {
    report.per_provider[i].provider_utility = provider[i].Value();
    report.per_provider[i].user_utility = user[i].Value();
    for (std::size_t ph = 0; ph < 4; ++ph) {
      report.per_phase[ph][i].provider_utility = phase_provider[ph][i].Value();
      report.per_phase[ph][i].user_utility = phase_user[ph][i].Value();
    }
  }
  report.user_total = UserUtility(transcript);
  if (profiles.size() >= 2) {
    const Benchmarks b = ComputeBenchmarks(profiles, transcript.budget);
    report.u_fb = b.u_fb;
    report.u_sb = b.u_sb;
  }
  report.gap_to_sb = report.u_sb - report.user_total;
  return report;
}

void WriteReportCsv(const UtilityReport& report, std::ostream& out) {
  out << "user_total,u_fb,u_sb,gap_to_sb";
  for (const UtilityLine& l : report.per_provider) {
    out << ",provider" << l.provider << "_utility,provider" << l.provider
        << "_delegations,provider" << l.provider << "_user_utility";
  }
  out << '\n';
  const auto old_precision = out.precision(17);
  out << report.user_total << ',' << report.u_fb << ',' << report.u_sb << ','
      << report.gap_to_sb;
  for (const UtilityLine& l : report.per_provider) {
    out << ',' << l.provider_utility << ',' << l.delegations << ','
        << l.user_utility;
  }
  out << '\n';
  out.precision(old_precision);
}

nlohmann::json ReportToJson(const UtilityReport& report) {
  using nlohmann::json;
  auto line = [](const UtilityLine& l) {
    return json{{"provider", l.provider},
                {"provider_utility", l.provider_utility},
                {"delegations", l.delegations},
                {"user_utility", l.user_utility}};
  };
  json doc;
  doc["user_total"] = report.user_total;
  doc["u_fb"] = report.u_fb;
  doc["u_sb"] = report.u_sb;
  doc["gap_to_sb"] = report.gap_to_sb;
  doc["per_provider"] = json::array();
  for (const UtilityLine& l : report.per_provider) {
    doc["per_provider"].push_back(line(l));
  }
  doc["per_phase"] = json::object();
  for (Phase ph : kAllPhases) {
    json lines = json::array();
    for (const UtilityLine& l : report.per_phase[PhaseSlot(ph)]) {
      lines.push_back(line(l));
    }
    doc["per_phase"][PhaseName(ph)] = std::move(lines);
  }
  return doc;
}

}  // namespace delegation
