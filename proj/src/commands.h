// Copyright 2026 The ICV Lab Authors
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

#ifndef ICV_SRC_COMMANDS_H_
#define ICV_SRC_COMMANDS_H_

// JSON-configured commands behind the C API and the CLI.

#include <string>

#include "icv/attribution.h"
#include "icv/envs.h"
#include "json.hpp"

namespace icv {

// Resolves defaults and rejects unknown keys (ConfigError naming the key).
nlohmann::json ResolveConfig(const std::string& command,
                             const nlohmann::json& config);

// The helpers below take a config already passed through ResolveConfig.
EnvSpec EnvSpecFromConfig(const nlohmann::json& config);
AttributionSettings AttributionSettingsFromConfig(const nlohmann::json& config,
                                                 std::uint64_t seed);
nlohmann::json AttributionReportJson(const AttributionReport& report);

// Each returns a JSON summary; outputs are written below config["out"].
// The verify summary carries "passed".
nlohmann::json CmdTrain(const nlohmann::json& config);
nlohmann::json CmdRollout(const nlohmann::json& config);
nlohmann::json CmdAttribute(const nlohmann::json& config);
nlohmann::json CmdVerify(const nlohmann::json& config);

}  // namespace icv

#endif  // ICV_SRC_COMMANDS_H_
