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

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string_view>

#include "ebflow/families.hpp"
#include "ebflow/superop.hpp"

namespace ebflow {

enum class Solver { closed_form, commuting_exp, ode };
std::string_view to_string(Solver solver);

struct OdeOptions {
  /// Mixed per-step error target: err <= abs_tol + rel_tol * max|Lambda|.
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  double initial_step = 1e-3;
  long max_steps = 5'000'000;
};

/// Lambda_t for one family. The solver is the closed form when present,
/// else exp(int L) for commuting families, else Dormand-Prince 5(4) on the
/// d^2 x d^2 equation dLambda/dt = L_t Lambda. Solved times are cached by
/// exact value; an ODE solve restarts from the latest cached time <= t.
class EvolutionHandle {
 public:
  explicit EvolutionHandle(std::shared_ptr<const GeneratorFamily> family,
                           std::optional<Solver> solver = std::nullopt, OdeOptions ode = {});
  explicit EvolutionHandle(GeneratorFamily family, std::optional<Solver> solver = std::nullopt,
                           OdeOptions ode = {});

  const GeneratorFamily& family() const { return *family_; }
  std::shared_ptr<const GeneratorFamily> family_ptr() const { return family_; }
  Solver solver() const { return solver_; }
  int dim() const { return family_->dim(); }

  /// Lambda_t, t >= 0. Throws IntegrationFailure when the ODE does not
  /// converge or trace preservation degrades beyond 1e-8.
  Superoperator solve(double t) const;

  /// V_{t,s} with V_{t,s} o Lambda_s = Lambda_t. Semigroups return
  /// Lambda_{t-s}, Floquet families P_t o e^{(t-s)X} o P_s^{-1}; otherwise
  /// Lambda_t o Lambda_s^{-1}, throwing SingularMap when cond(Lambda_s) > 1e12.
  Superoperator propagator(double t, double s) const;

  /// Disable the cache for parallel sweeps that want no shared writes.
  void set_cache_enabled(bool enabled);
  void clear_cache() const;
  std::size_t cache_size() const;

 private:
  Superoperator solve_uncached(double t) const;
  Superoperator integrate_ode(double t0, const Matrix& y0, double t1) const;

  std::shared_ptr<const GeneratorFamily> family_;
  Solver solver_;
  OdeOptions ode_;
  bool cache_enabled_ = true;
  mutable std::mutex mutex_;
  mutable std::map<double, Superoperator> cache_;
};

/// One-shot solve with the default solver choice.
Superoperator solve(const GeneratorFamily& family, double t);

}  // namespace ebflow
