// Copyright 2026 The ebflow Authors
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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ebflow/cli/config.hpp"

namespace ebflow::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_config_error = 1,
  exit_numerical_failure = 2,
  exit_consistency_violation = 3,
};

/// Command-line values that take precedence over the config file.
struct Overrides {
  std::optional<std::string> out_dir;
  std::optional<std::string> format;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<double> t_max;
  std::optional<double> tol;
};

void apply_overrides(AnalysisConfig& cfg, const Overrides& o);

/// Rendered report of one analysis; nothing is written to disk.
struct RunResult {
  int exit_code = exit_ok;
  std::string stem;  // file name without extension
  std::string json;
  std::string csv;
  std::string summary;  // one-paragraph human summary for stdout
};

/// Runs `command` (classify, arrival, divisibility, ppt2, reproduce) on the
/// config. Library errors are mapped to exit codes; reports are
/// deterministic for a fixed config and seed.
RunResult run_analysis(const std::string& command, const AnalysisConfig& cfg);

/// Writes `<out_dir>/<stem>.<format>`; returns the path.
std::string write_report(const RunResult& result, const AnalysisConfig& cfg);

/// One row per catalog kind with its config keys.
std::string list_families_text();

/// Full-precision decimal rendering used in CSV output ("%.17g").
std::string format_number(double x);

}  // namespace ebflow::cli
