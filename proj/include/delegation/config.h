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

#ifndef DELEGATION_CONFIG_H_
#define DELEGATION_CONFIG_H_

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "delegation/model.h"
#include "json.hpp"

namespace delegation {

struct LoadedConfig {
  GameConfig game;
  std::vector<ProviderProfile> providers;  // Index i holds provider id i+1.
};

// Parses a `reward,gen_length` CSV. Bounds are not checked here; that is
// ProviderProfile::Validate's job.
SampleBank ReadSampleBank(std::istream& in, const std::string& source_id);
SampleBank ReadSampleBankFile(const std::filesystem::path& path);

// Builds and fully validates a configuration from a parsed JSON document.
// Sample files are resolved relative to `base_dir`. Prices and variant costs
// are multiplied by price_scale.
LoadedConfig ParseConfig(const nlohmann::json& doc,
                         const std::filesystem::path& base_dir);

// Reads a JSON config file. Throws ConfigError on any problem.
LoadedConfig LoadConfig(const std::filesystem::path& path);

}  // namespace delegation

#endif  // DELEGATION_CONFIG_H_
