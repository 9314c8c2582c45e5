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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ebflow/asymptotics.hpp"
#include "ebflow/evolve.hpp"

namespace ebflow {

enum class DivisibilityVerdict { eX_divisible_certified, refuted, undetermined };
std::string_view to_string(DivisibilityVerdict v);

enum class DivisibilityShortcut { semigroup, cp_divisible_one_instant, none };
std::string_view to_string(DivisibilityShortcut s);

struct DivisibilityOptions {
  ArrivalSearch search;       // horizon per s; default t_max of the family
  std::vector<double> s_grid; // empty: default_s_grid(t_max)
  bool use_shortcuts = true;
};

struct DeltaEntry {
  double s = 0.0;
  std::optional<double> delta;  // Delta(s) when reached and retained
  ArrivalResult arrival;        // search on t -> V_{t,s}
  std::optional<double> tail_witness;  // analytic lim_t witness of V_{t,s}
  bool refutes = false;
};

struct DivisibilityReport {
  Cone cone = Cone::EB;
  std::vector<double> s_grid;
  std::vector<DeltaEntry> entries;
  DivisibilityVerdict verdict = DivisibilityVerdict::undetermined;
  DivisibilityShortcut shortcut_used = DivisibilityShortcut::none;
  std::string note;
};

/// s = 0 plus 15 geometric points from 1e-3 * t_max/2 to t_max/2.
std::vector<double> default_s_grid(double t_max);

/// Delta(s) for t -> V_{t,s} on each grid point. Semigroups reuse one arrival
/// time, Delta(s) = s + tau; CP-divisible families certify the tail from one
/// instant inside the cone. A negative analytic tail limit, or a witness stuck
/// below -10 psd_tol at the horizon, refutes.
DivisibilityReport scan_divisibility(const EvolutionHandle& handle, Cone cone,
                                     const DivisibilityOptions& options = {});

struct ChainCheck {
  bool consistent = true;
  std::vector<std::string> violations;
};

/// eEB => ePPT => eCP => eP (and ePPT => ecoCP) on one family: a certified
/// stronger cone next to a refuted weaker one, or Delta_strong(s) <
/// Delta_weak(s), is an internal inconsistency.
ChainCheck check_implication_chain(const std::vector<DivisibilityReport>& reports);

}  // namespace ebflow
