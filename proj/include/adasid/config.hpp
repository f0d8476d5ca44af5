// Copyright 2026 The AdaSID Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ADASID_CONFIG_HPP
#define ADASID_CONFIG_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "adasid/data.hpp"
#include "adasid/diagnostics.hpp"
#include "adasid/trainer.hpp"

namespace adasid {

struct DataPaths {
  std::string features;
  std::string pairs;
};

/// Full tool configuration: data paths, training (tokenizer, regulation,
/// schedule, optimizer), and the synthetic generator.
struct AppConfig {
  DataPaths data;
  TrainConfig train;
  SynthConfig synth;
};

/// Strict parsers: unknown keys and wrongly typed values raise ConfigError.
AppConfig app_config_from_json(const nlohmann::json& j);
nlohmann::json app_config_to_json(const AppConfig& config);

TrainConfig train_config_from_json(const nlohmann::json& j);
nlohmann::json train_config_to_json(const TrainConfig& config);

/// Reads and parses a config file; unreadable or syntactically invalid
/// files raise DataError.
nlohmann::json load_config_file(const std::string& path);

/// Applies one "dotted.path=value" override onto a config JSON tree. The
/// value text is parsed as JSON when possible and kept as a string
/// otherwise. Unknown paths surface later through the strict parser.
void apply_override(nlohmann::json& config, const std::string& assignment);

/// One loss-log line: exactly the LossBreakdown fields.
nlohmann::json loss_breakdown_to_json(const LossBreakdown& lb);
LossBreakdown loss_breakdown_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const DiagnosticsReport& report);

}  // namespace adasid

#endif  // ADASID_CONFIG_HPP
