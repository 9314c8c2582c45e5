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

#include <array>
#include <cmath>
#include <functional>
#include <type_traits>
#include <utility>

#include "ebflow/errors.hpp"
#include "ebflow/matcore.hpp"

namespace ebflow::quadrature {

namespace detail {

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// Gauss-Kronrod 7/15 nodes on [-1, 1].
inline constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename T, typename F>
std::pair<T, double> gk15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  T center = f(c);
  T kronrod = kKronrodWeights[7] * center;
  T gauss = kGaussWeights[3] * center;
  for (int i = 0; i < 7; ++i) {
    const T lo = f(c - h * kNodes[i]);
    const T hi = f(c + h * kNodes[i]);
    kronrod = kronrod + kKronrodWeights[i] * (lo + hi);
    if (i % 2 == 1) gauss = gauss + kGaussWeights[i / 2] * (lo + hi);
  }
  kronrod = h * kronrod;
  gauss = h * gauss;
  return {kronrod, magnitude(T(kronrod - gauss))};
}

template <typename T, typename F>
T adapt(const F& f, double a, double b, double tol, int depth) {
  auto [value, err] = gk15<T>(f, a, b);
  if (err <= tol || depth >= 40 || b - a <= 1e-14 * (1.0 + std::abs(a))) {
    if (err > tol && depth >= 40) {
      throw Error(ErrorKind::NoConvergence, "adaptive quadrature: tolerance not reached");
    }
    return value;
  }
  const double m = 0.5 * (a + b);
  return adapt<T>(f, a, m, 0.5 * tol, depth + 1) + adapt<T>(f, m, b, 0.5 * tol, depth + 1);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod 7/15 integration of a scalar- or matrix-valued
/// function on [a, b] to absolute tolerance `abs_tol` (max-entry norm).
template <typename T, typename F>
T integrate(const F& f, double a, double b, double abs_tol = 1e-10) {
  if (a == b) return T(0.0 * f(a));
  if (b < a) return T(-integrate<T>(f, b, a, abs_tol));
  return detail::adapt<T>(f, a, b, abs_tol, 0);
}

}  // namespace ebflow::quadrature
