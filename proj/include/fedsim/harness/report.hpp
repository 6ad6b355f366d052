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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace fedsim::harness {

struct Report {
  std::string text;
  std::string summary_json;
  // Criteria checked from these runs, as "PASS|FAIL [id] name: detail".
  std::vector<std::string> checks;
};

// Reads summary.json and rounds.csv from every directory. Throws ConfigError
// listing every missing or corrupt input; nothing is rendered in that case.
Report build_report(const std::vector<std::filesystem::path>& dirs);

// Writes report.txt and report.json into `output` and prints the text.
int cmd_report(const std::vector<std::filesystem::path>& dirs,
               const std::filesystem::path& output, std::ostream& out,
               std::ostream& err);

}  // namespace fedsim::harness
