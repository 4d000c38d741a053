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

#include "delegation/config.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>

namespace delegation {
namespace {

using nlohmann::json;

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T>
bool ParseNumber(std::string_view text, T& out) {
  text = Trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && !text.empty();
}

template <typename T>
T Require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ConfigError(where + ": missing field '" + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": field '" + key + "' has the wrong type");
  }
}

template <typename T>
T Optional(const json& obj, const char* key, T fallback,
           const std::string& where) {
  if (!obj.contains(key)) return fallback;
  return Require<T>(obj, key, where);
}

}  // namespace

SampleBank ReadSampleBank(std::istream& in, const std::string& source_id) {
  SampleBank bank;
  bank.source_id = source_id;
  std::string line;
  int line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view row = Trim(line);
    if (row.empty()) continue;
    if (!saw_header) {
      std::string header(row);
      header.erase(std::remove(header.begin(), header.end(), ' '),
                   header.end());
      if (header != "reward,gen_length") {
        throw ConfigError(source_id +
                          ": expected header 'reward,gen_length'");
      }
      saw_header = true;
      continue;
    }
    const std::size_t comma = row.find(',');
    OutcomeSample sample;
    if (comma == std::string_view::npos ||
        !ParseNumber(row.substr(0, comma), sample.reward) ||
        !ParseNumber(row.substr(comma + 1), sample.gen_length)) {
      throw ConfigError(source_id + ":" + std::to_string(line_no) +
                        ": malformed row '" + std::string(row) + "'");
    }
    bank.samples.push_back(sample);
  }
  if (!saw_header) throw ConfigError(source_id + ": empty sample file");
  return bank;
}

SampleBank ReadSampleBankFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("missing sample file: " + path.string());
  return ReadSampleBank(in, path.string());
}

LoadedConfig ParseConfig(const json& doc,
                         const std::filesystem::path& base_dir) {
  LoadedConfig out;
  GameConfig& g = out.game;
  g.T = Require<std::int64_t>(doc, "T", "config");
  g.K = Require<int>(doc, "K", "config");
  g.epsilon = Require<double>(doc, "epsilon", "config");
  g.seed = Optional<std::uint64_t>(doc, "seed", 0, "config");
  g.gamma = Optional<double>(doc, "gamma", 0.0, "config");
  g.price_scale = Optional<double>(doc, "price_scale", 1e-6, "config");
  g.Validate();

  if (!doc.contains("providers") || !doc["providers"].is_array()) {
    throw ConfigError("config: missing array 'providers'");
  }
  const json& providers = doc["providers"];
  if (static_cast<int>(providers.size()) != g.K) {
    throw ConfigError("config: K=" + std::to_string(g.K) + " but " +
                      std::to_string(providers.size()) +
                      " providers listed");
  }
  for (std::size_t i = 0; i < providers.size(); ++i) {
    const json& pj = providers[i];
    const std::string where = "providers[" + std::to_string(i) + "]";
    ProviderProfile p;
    p.id = Optional<int>(pj, "id", static_cast<int>(i) + 1, where);
    if (p.id != static_cast<int>(i) + 1) {
      throw ConfigError(where + ": id must equal its 1-based position");
    }
    p.price_per_token =
        Require<double>(pj, "price_per_token", where) * g.price_scale;
    p.R = Require<double>(pj, "R", where);
    p.L = Require<int>(pj, "L", where);
    if (!pj.contains("variants") || !pj["variants"].is_array()) {
      throw ConfigError(where + ": missing array 'variants'");
    }
    for (std::size_t m = 0; m < pj["variants"].size(); ++m) {
      const json& vj = pj["variants"][m];
      const std::string vwhere = where + ".variants[" + std::to_string(m) + "]";
      ModelVariant v;
      v.name = Optional<std::string>(vj, "name", "variant" + std::to_string(m),
                                     vwhere);
      v.cost_per_token =
          Require<double>(vj, "cost_per_token", vwhere) * g.price_scale;
      const auto file = Require<std::string>(vj, "samples_file", vwhere);
      v.bank = ReadSampleBankFile(base_dir / file);
      p.variants.push_back(std::move(v));
    }
    std::stable_sort(p.variants.begin(), p.variants.end(),
                     [](const ModelVariant& a, const ModelVariant& b) {
                       return a.cost_per_token < b.cost_per_token;
                     });
    p.Validate();
    out.providers.push_back(std::move(p));
  }
  return out;
}

LoadedConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("parse error in " + path.string() + ": " + e.what());
  }
  return ParseConfig(doc, path.parent_path());
}

}  // namespace delegation
