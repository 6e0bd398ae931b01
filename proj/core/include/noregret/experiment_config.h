// Copyright 2026 The noregret-lab Authors
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

#ifndef NOREGRET_EXPERIMENT_CONFIG_H_
#define NOREGRET_EXPERIMENT_CONFIG_H_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "noregret/ensemble.h"
#include "noregret/probes.h"

namespace noregret {

std::string_view Version();

// Thrown for malformed or inconsistent experiment settings. The message names
// the key and the expected grammar.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Validated key = value settings with defaults applied. Values are kept in
// canonical text form so that serialisation round-trips exactly.
//
// The opponent is `script` when that key is non-empty, otherwise `strategy2`.
class ExperimentConfig {
 public:
  // All keys at their defaults.
  ExperimentConfig();

  // "key = value" lines; '#' starts a comment; blank lines are ignored.
  // Unknown or repeated keys are errors.
  static ExperimentConfig Parse(std::string_view text);
  static ExperimentConfig Load(const std::string& path);

  // Validates and stores one setting, replacing the current value.
  void Set(std::string_view key, std::string_view value);
  // "key=value" form used by --set.
  void SetAssignment(std::string_view assignment);

  const std::string& Get(std::string_view key) const;
  std::int64_t GetInt(std::string_view key) const;
  double GetReal(std::string_view key) const;

  Game2x2 game() const;
  StrategySpec strategy1() const;
  std::optional<StrategySpec> strategy2() const;
  std::optional<OpponentScript> script() const;
  FeedbackMode mode() const;
  std::uint64_t seed() const;
  // 0 means "use every hardware thread".
  int workers() const;
  Normalization normalization() const;

  RunConfig ToRunConfig() const;

  // Every key, sorted, one "key = value" per line.
  std::string Serialize() const;
  // Git blob SHA-1 of the serialisation minus output_dir and workers.
  std::string Hash() const;
  nlohmann::json ToJson() const;

  static std::vector<std::string> Keys();

  bool operator==(const ExperimentConfig&) const = default;

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

struct RunManifest {
  std::string subcommand;
  nlohmann::json config;
  std::string config_hash;
  std::string tool_version;
  double wall_seconds = 0.0;
  std::vector<std::string> outputs;

  nlohmann::json ToJson() const;
};

// Lowercase hex SHA-1 of "blob <size>\0<content>".
std::string GitBlobSha1(std::string_view content);

}  // namespace noregret

#endif  // NOREGRET_EXPERIMENT_CONFIG_H_
