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

#include <vector>

#include "ebflow/matcore.hpp"

namespace ebflow {

/// Column-stacking vectorisation: vec(X)[i + j*d] = X(i, j), so that
/// vec(A X B) = (B^T (x) A) vec(X).
Vector vec(const Matrix& x);
Matrix unvec(const Vector& v, int d);

/// A linear map on M_d stored as its d^2 x d^2 matrix in the column-stacking
/// convention.
class Superoperator {
 public:
  Superoperator() = default;
  Superoperator(int d, Matrix matrix);

  static Superoperator identity(int d);
  static Superoperator zero(int d);
  /// The transposition map X -> X^T.
  static Superoperator transpose(int d);
  /// X -> A X B.
  static Superoperator sandwich(const Matrix& a, const Matrix& b);
  /// X -> K X K^dagger.
  static Superoperator conjugation(const Matrix& k);
  /// X -> sum_k K_k X K_k^dagger.
  static Superoperator from_kraus(const std::vector<Matrix>& kraus);

  int dim() const { return d_; }
  const Matrix& matrix() const { return m_; }

  Superoperator operator+(const Superoperator& o) const;
  Superoperator operator-(const Superoperator& o) const;
  Superoperator operator*(cplx s) const;

 private:
  int d_ = 0;
  Matrix m_;
};

inline Superoperator operator*(cplx s, const Superoperator& phi) { return phi * s; }

struct ChoiMatrix {
  int d = 0;
  Matrix matrix;  // block (i, j) of size d is phi(E_ij)
};

/// Qualify as ebflow::apply when passing temporaries (ADL also finds std::apply).
Matrix apply(const Superoperator& phi, const Matrix& x);

/// (phi o psi)(X) = phi(psi(X)).
Superoperator compose(const Superoperator& phi, const Superoperator& psi);

/// n-fold composition phi^n (phi^0 is the identity).
Superoperator power(const Superoperator& phi, int n);

/// Assembled blockwise from phi(E_ij), C = sum_ij E_ij (x) phi(E_ij).
ChoiMatrix to_choi(const Superoperator& phi);
Superoperator from_choi(const ChoiMatrix& c);

/// Hilbert-Schmidt adjoint: <a, phi(b)> = <phi*(a), b>.
Superoperator adjoint(const Superoperator& phi);

bool is_trace_preserving(const Superoperator& phi, double tol = psd_tol);
bool is_unital(const Superoperator& phi, double tol = psd_tol);

/// Inverse map; throws SingularMap when the condition number exceeds
/// `cond_limit`.
Superoperator inverse(const Superoperator& phi, double cond_limit = 1e12);

/// Upper bound on the operator-norm-induced (supremum) distance between two
/// maps: sqrt(d) * ||Phi - Psi||_2.
double sup_distance(const Superoperator& phi, const Superoperator& psi);

/// <a, b>_HS = tr(a^dagger b).
cplx hs_inner(const Matrix& a, const Matrix& b);

struct MapSpectrum {
  Vector eigenvalues;
  std::vector<Matrix> right;  // X_i, unit Hilbert-Schmidt norm
  std::vector<Matrix> left;   // Y_i with <Y_i, X_j> = delta_ij
  double biorthogonality_residual = 0.0;
  double condition = 1.0;

  /// Rank-one projector <Y_i, .> X_i.
  Superoperator projector(std::size_t i) const;
};

/// Diagonalises phi. Throws Defective when the eigenvector matrix has
/// condition number above `cond_limit`.
MapSpectrum map_spectrum(const Superoperator& phi, double cond_limit = 1e8);

}  // namespace ebflow
