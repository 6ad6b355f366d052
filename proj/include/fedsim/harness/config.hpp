/*
 * Copyright 2026 The fedsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fedsim/fedcore/experiment.hpp"
#include "fedsim/fedcore/round.hpp"
#include "fedsim/objectives/dataset_task.hpp"
#include "fedsim/objectives/quadratic.hpp"
#include "fedsim/objectives/task.hpp"

namespace fedsim::harness {

enum class ValueType { kInt, kReal, kBool, kString, kChoice, kIntList };

// One row of the configuration reference. An empty default means the key is
// required (when `required`) or has a derived default described in `doc`.
struct KeySpec {
  std::string_view section;
  std::string_view key;
  ValueType type;
  std::string_view default_value;
  std::string_view doc;
  std::string_view choices = {};  // '|'-separated for kChoice
  bool required = false;
};

std::span<const KeySpec> config_schema();
std::string_view to_string(ValueType t);

// Flat "section.key" -> raw text, as written in the file.
struct ConfigValues {
  std::map<std::string, std::string> entries;
  std::map<std::string, int> lines;  // source line of each key, if any
  std::string origin = "<string>";
};

// Reads `[section]` headers and `key = value` lines; '#' starts a comment.
// Throws ConfigError on malformed lines, unknown sections or keys, and
// duplicate keys.
ConfigValues read_config_text(std::string_view text, std::string origin = "<string>");
ConfigValues read_config_file(const std::filesystem::path& path);

struct MetricsSettings {
  int record_every = 1;
  bool test_metrics = true;
  double blowup_factor = 1e6;
  int probe_budget = 200;
  int gradcheck_points = 20;
  double gradcheck_eps = 1e-5;
  int stability_client = 0;
  int stability_position = 0;
  int stability_probe_points = 500;
  std::vector<int> stability_checkpoints;  // empty: 8 evenly spaced rounds
};

enum class OracleMode { kAuto, kOn, kOff };

struct ExperimentConfig {
  objectives::TaskKind task = objectives::TaskKind::kQuadratic;
  objectives::QuadraticSpec quadratic;
  objectives::ClassificationSpec classification;
  OracleMode oracle = OracleMode::kAuto;
  int oracle_steps = 5000;
  std::optional<std::uint64_t> task_seed;

  fed::RunSpec run;
  int replicates = 1;
  std::uint64_t seed = 0;
  std::string output = "runs/default";
  fed::Guards guards;
  MetricsSettings metrics;

  // Resolved values including defaults, for provenance in outputs.
  ConfigValues resolved;

  int clients() const;
  bool wants_oracle() const;
};

// Validates values against the schema and every cross-key invariant, then
// builds the config. All problems are reported together in one ConfigError.
ExperimentConfig build_config(const ConfigValues& values);
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

// `section.key` override, validated against the schema; returns a copy.
ConfigValues with_override(ConfigValues values, const std::string& key,
                           const std::string& value);

// Seed of replicate r: hash(master_seed, r).
std::uint64_t replicate_seed(std::uint64_t master, int replicate);

// The task a replicate trains on. Data are drawn from the fixed task seed
// when given, otherwise from the replicate seed.
std::unique_ptr<objectives::Task> make_task(const ExperimentConfig& config,
                                            std::uint64_t replicate_seed);

}  // namespace fedsim::harness
