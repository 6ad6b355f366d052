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

// fedsim: command-line front end for runs, sweeps, checks and reports.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fedsim/core/execution.hpp"
#include "fedsim/harness/acceptance.hpp"
#include "fedsim/harness/report.hpp"
#include "fedsim/harness/runner.hpp"

namespace fs = std::filesystem;
using namespace fedsim::harness;

namespace {

int run_acceptance(const std::vector<int>& only) {
  bool all_passed = true;
  for (const auto& c : acceptance_criteria()) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto r = run_criterion(c);
    std::printf("%s [%2d] %s: %s (%.1f s)\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.detail.c_str(), r.seconds);
    std::fflush(stdout);
    all_passed &= r.passed;
  }
  return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  fedsim::apply_worker_override();

  CLI::App app{"Deterministic federated-learning simulator"};
  app.require_subcommand(1);

  std::string config;
  auto* run = app.add_subcommand("run", "run every replicate of a config and write its outputs");
  run->add_option("config", config, "config file")->required()->check(CLI::ExistingFile);

  std::string axis;
  std::vector<std::string> values;
  auto* sweep_cmd = app.add_subcommand("sweep", "run a config across values of one axis");
  sweep_cmd->add_option("config", config, "config file")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--axis", axis, "beta, K, N or Dr")
      ->required()
      ->check(CLI::IsMember({"beta", "K", "N", "Dr"}));
  sweep_cmd->add_option("--values", values, "comma-separated values")->required()->delimiter(',');

  auto* grad = app.add_subcommand("gradcheck", "finite-difference check of the task gradients");
  grad->add_option("config", config, "config file")->required()->check(CLI::ExistingFile);

  auto* stab = app.add_subcommand("stability", "paired neighbouring-dataset stability probe");
  stab->add_option("config", config, "config file")->required()->check(CLI::ExistingFile);

  std::vector<std::string> dirs;
  std::string report_out = "report";
  auto* rep = app.add_subcommand("report", "summarize run directories");
  rep->add_option("dirs", dirs, "run output directories");
  rep->add_option("--output", report_out, "directory for report.txt and report.json");

  std::vector<int> only;
  std::string export_dir;
  auto* acc = app.add_subcommand("acceptance", "run the acceptance criteria");
  acc->add_option("--only", only, "criterion ids")->delimiter(',');
  acc->add_option("--export", export_dir, "write the built-in configs to this directory and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  if (*run) return cmd_run(config, std::cout, std::cerr);
  if (*sweep_cmd) return cmd_sweep(config, axis, values, std::cout, std::cerr);
  if (*grad) return cmd_gradcheck(config, std::cout, std::cerr);
  if (*stab) return cmd_stability(config, std::cout, std::cerr);
  if (*rep) {
    std::vector<fs::path> paths(dirs.begin(), dirs.end());
    return cmd_report(paths, report_out, std::cout, std::cerr);
  }
  if (*acc) {
    if (!export_dir.empty()) {
      fs::create_directories(export_dir);
      for (auto name : acceptance_config_names()) {
        std::ofstream(fs::path(export_dir) / (std::string(name) + ".conf"), std::ios::binary)
            << acceptance_config_file(name);
      }
      return 0;
    }
    return run_acceptance(only);
  }
  return kExitConfigError;
}
