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

#include <cmath>
#include <string>

#include <json.hpp>

#include "ebflow/asymptotics.hpp"
#include "ebflow/cli/config.hpp"
#include "ebflow/cli/run.hpp"
#include "ebflow/divisibility.hpp"

namespace ebflow::cli::detail {

using json = nlohmann::ordered_json;

inline json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json family_json(const GeneratorFamily& fam);
json parameters_json(const RawConfig& raw);
json verdict_json(const AsymptoticVerdict& v);
json arrival_json(const ArrivalResult& r);

/// Joins CSV cells with ',' and terminates the row.
std::string csv_row(const std::vector<std::string>& cells);

RunResult run_reproduce(const AnalysisConfig& cfg);

}  // namespace ebflow::cli::detail
