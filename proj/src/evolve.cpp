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

#include "ebflow/evolve.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "ebflow/errors.hpp"

namespace ebflow {

std::string_view to_string(Solver solver) {
  switch (solver) {
    case Solver::closed_form: return "closed_form";
    case Solver::commuting_exp: return "commuting_exp";
    case Solver::ode: return "ode";
  }
  return "?";
}

namespace {

Solver default_solver(const GeneratorFamily& f) {
  if (f.closed_form() && f.closed_form()->map) return Solver::closed_form;
  if (f.traits().commutative) return Solver::commuting_exp;
  return Solver::ode;
}

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// Dormand-Prince 5(4) tableau.
constexpr std::array<double, 7> kC = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
constexpr std::array<double, 7> kB5 = {35.0 / 384,     0.0, 500.0 / 1113, 125.0 / 192,
                                       -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr std::array<double, 7> kB4 = {5179.0 / 57600,    0.0,           7571.0 / 16695,
                                       393.0 / 640,       -92097.0 / 339200, 187.0 / 2100,
                                       1.0 / 40};

}  // namespace

EvolutionHandle::EvolutionHandle(std::shared_ptr<const GeneratorFamily> family,
                                 std::optional<Solver> solver, OdeOptions ode)
    : family_(std::move(family)), ode_(ode) {
  if (!family_) throw Error(ErrorKind::InvalidParameter, "EvolutionHandle: null family");
  solver_ = solver.value_or(default_solver(*family_));
  if (solver_ == Solver::closed_form && !(family_->closed_form() && family_->closed_form()->map)) {
    throw Error(ErrorKind::InvalidParameter, "EvolutionHandle: family has no closed form");
  }
  if (solver_ == Solver::commuting_exp && !family_->traits().commutative) {
    throw Error(ErrorKind::InvalidParameter, "EvolutionHandle: family is not commutative");
  }
}

EvolutionHandle::EvolutionHandle(GeneratorFamily family, std::optional<Solver> solver,
                                 OdeOptions ode)
    : EvolutionHandle(std::make_shared<const GeneratorFamily>(std::move(family)), solver, ode) {}

void EvolutionHandle::set_cache_enabled(bool enabled) {
  std::lock_guard lock(mutex_);
  cache_enabled_ = enabled;
  if (!enabled) cache_.clear();
}

void EvolutionHandle::clear_cache() const {
  std::lock_guard lock(mutex_);
  cache_.clear();
}

std::size_t EvolutionHandle::cache_size() const {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

Superoperator EvolutionHandle::solve(double t) const {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw Error(ErrorKind::InvalidParameter, "solve: t must be finite and >= 0");
  }
  if (t == 0.0) return Superoperator::identity(dim());
  {
    std::lock_guard lock(mutex_);
    if (cache_enabled_) {
      if (auto it = cache_.find(t); it != cache_.end()) return it->second;
    }
  }
  Superoperator out = solve_uncached(t);
  std::lock_guard lock(mutex_);
  if (cache_enabled_) cache_.emplace(t, out);
  return out;
}

Superoperator EvolutionHandle::solve_uncached(double t) const {
  switch (solver_) {
    case Solver::closed_form: return family_->closed_form()->map(t);
    case Solver::commuting_exp: {
      const Superoperator integral = family_->integrated(t);
      return {dim(), expm(integral.matrix())};
    }
    case Solver::ode: break;
  }
  double t0 = 0.0;
  Matrix y0 = Matrix::Identity(dim() * dim(), dim() * dim());
  {
    std::lock_guard lock(mutex_);
    if (cache_enabled_) {
      auto it = cache_.upper_bound(t);
      if (it != cache_.begin()) {
        --it;
        t0 = it->first;
        y0 = it->second.matrix();
      }
    }
  }
  Superoperator out = integrate_ode(t0, y0, t);
  const int d = dim();
  const Vector id = vec(Matrix::Identity(d, d));
  const double tp_defect = max_abs(out.matrix().adjoint() * id - id);
  if (tp_defect > 1e-8) {
    throw Error(ErrorKind::IntegrationFailure,
                "trace preservation lost at t=" + std::to_string(t) + " (defect " +
                    std::to_string(tp_defect) + ")");
  }
  return out;
}

Superoperator EvolutionHandle::integrate_ode(double t0, const Matrix& y0, double t1) const {
  Matrix y = y0;
  double t = t0;
  double h = std::min(ode_.initial_step, t1 - t0);
  std::array<Matrix, 7> k;
  auto rhs = [this](double s, const Matrix& m) { return Matrix(family_->evaluate(s).matrix() * m); };
  k[0] = rhs(t, y);
  long steps = 0;
  while (t < t1) {
    if (++steps > ode_.max_steps) {
      throw Error(ErrorKind::IntegrationFailure, "ODE: step budget exhausted");
    }
    const bool last = t + h >= t1;
    if (last) h = t1 - t;
    for (int s = 1; s < 7; ++s) {
      Matrix ys = y;
      for (int j = 0; j < s; ++j) {
        if (kA[s][j] != 0.0) ys += (h * kA[s][j]) * k[j];
      }
      k[s] = rhs(t + kC[s] * h, ys);
    }
    Matrix y5 = y;
    Matrix err = Matrix::Zero(y.rows(), y.cols());
    for (int s = 0; s < 7; ++s) {
      if (kB5[s] != 0.0) y5 += (h * kB5[s]) * k[s];
      err += (h * (kB5[s] - kB4[s])) * k[s];
    }
    const double scale = ode_.abs_tol + ode_.rel_tol * std::max(max_abs(y), max_abs(y5));
    const double ratio = max_abs(err) / scale;
    if (!std::isfinite(ratio)) {
      throw Error(ErrorKind::IntegrationFailure, "ODE: non-finite state");
    }
    if (ratio <= 1.0) {
      t = last ? t1 : t + h;
      y = std::move(y5);
      k[0] = k[6];  // first-same-as-last
    }
    const double factor = ratio == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(ratio, -0.2), 0.2, 5.0);
    h *= factor;
    if (h < 1e-14 * std::max(1.0, std::abs(t))) {
      throw Error(ErrorKind::IntegrationFailure, "ODE: step size underflow");
    }
  }
  return {dim(), y};
}

Superoperator EvolutionHandle::propagator(double t, double s) const {
  if (!(s >= 0.0) || !(t >= s)) {
    throw Error(ErrorKind::InvalidParameter, "propagator: need t >= s >= 0");
  }
  if (t == s) return Superoperator::identity(dim());
  if (s == 0.0) return solve(t);
  if (family_->traits().constant) return solve(t - s);
  if (const FloquetStructure* fl = family_->floquet(); fl && solver_ == Solver::closed_form) {
    const Superoperator x = fl->core->evaluate(0.0);
    const Superoperator pt = Superoperator::conjugation(fl->drive(t));
    const Superoperator ps_inv = Superoperator::conjugation(fl->drive(s).adjoint());
    return compose(pt, compose(Superoperator(dim(), expm(x.matrix() * (t - s))), ps_inv));
  }
  return compose(solve(t), inverse(solve(s), 1e12));
}

Superoperator solve(const GeneratorFamily& family, double t) {
  return EvolutionHandle(std::make_shared<const GeneratorFamily>(family)).solve(t);
}

}  // namespace ebflow
