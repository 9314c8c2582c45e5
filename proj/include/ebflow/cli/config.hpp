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
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ebflow/classify.hpp"
#include "ebflow/families.hpp"

namespace ebflow::cli {

/// One `key = value` line.
struct Entry {
  std::string value;
  int line = 0;
};

struct Section {
  std::string name;
  int line = 0;
  std::map<std::string, Entry> entries;

  const Entry* find(const std::string& key) const;
};

/// Sections in file order. `[family]` is required; `[core]` belongs to
/// Floquet families; `[analysis]` and `[output]` are optional.
struct RawConfig {
  std::string origin;
  std::vector<Section> sections;

  const Section* section(std::string_view name) const;
};

/// Parses the INI-like format: `[section]` headers, `key = value` pairs,
/// `#` comments. Throws Error(ConfigError) with "origin:line" diagnostics.
RawConfig parse_config_text(std::string_view text, std::string origin = "<config>");
RawConfig load_config(const std::string& path);

struct AnalysisConfig {
  RawConfig raw;
  std::string analysis;  // optional `type`; the subcommand must agree
  std::vector<double> times;
  std::vector<Cone> cones;
  std::vector<double> s_grid;
  std::optional<double> t_max;
  int grid_n = 2000;
  std::optional<double> bisect_tol;
  double tol = psd_tol;
  bool use_shortcuts = true;
  int n_max = 20;
  double map_time = 1.0;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out_dir = ".";
  std::string format = "json";
};

/// Validates `[analysis]` and `[output]`; unknown keys are rejected.
AnalysisConfig build_analysis_config(RawConfig raw);

/// Builds the family described by `[family]` (and `[core]` for Floquet).
std::shared_ptr<const GeneratorFamily> build_family(const RawConfig& raw);

/// Keys accepted for each kind, for list-families and the schema docs.
std::vector<std::string> family_keys(FamilyKind kind);

// Value parsers, exposed for tests. Each throws Error(ConfigError).
double parse_real(const std::string& text);
cplx parse_complex(const std::string& text);
std::vector<double> parse_real_list(const std::string& text);
/// Rows separated by ';', entries by whitespace; entries may be complex
/// ("1-2i", "0.5i"). Names sx, sy, sz, sp, sm denote qubit operators.
Matrix parse_matrix(const std::string& text);

}  // namespace ebflow::cli
