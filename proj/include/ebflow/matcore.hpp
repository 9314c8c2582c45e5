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

#include <complex>

#include <Eigen/Dense>

namespace ebflow {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Global positive-semidefiniteness tolerance. Cone-membership thresholds
/// throughout the library derive from this single value.
inline constexpr double psd_tol = 1e-9;

/// Hermiticity tolerance for a matrix: 1e-10 * max(1, ||M||_inf).
double herm_tol(const Matrix& m);

/// max_ij |M_ij - conj(M_ji)|.
double hermiticity_defect(const Matrix& m);
bool is_hermitian(const Matrix& m);
Matrix hermitian_part(const Matrix& m);

/// Induced infinity norm (max absolute row sum).
double norm_inf(const Matrix& m);
double spectral_norm(const Matrix& m);

struct HermEig {
  RealVector values;  // ascending
  Matrix vectors;     // unitary, columns are eigenvectors
};

/// Eigendecomposition of a Hermitian matrix. Throws NotHermitian when the
/// input violates herm_tol, NoConvergence when the solver fails.
HermEig herm_eig(const Matrix& m);

/// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const Matrix& m);

/// Matrix exponential. Uses the eigenbasis when the eigenvector matrix has
/// condition number below 1e6, otherwise Pade scaling-and-squaring.
Matrix expm(const Matrix& m);

/// Condition number sigma_max / sigma_min in the spectral norm; +inf when
/// singular.
double condition_number(const Matrix& m);

Matrix kron(const Matrix& a, const Matrix& b);

/// Transposes each d2 x d2 block of a (d1*d2) x (d1*d2) matrix.
Matrix partial_transpose_second(const Matrix& m, int d1, int d2);

/// Matrix unit E_ij of size d (0-indexed).
Matrix matrix_unit(int d, int i, int j);

namespace pauli {
Matrix sigma(int k);  // k = 1, 2, 3; k = 0 or 4 gives the identity
Matrix sigma_plus();  // (sigma_1 + i sigma_2) / 2
Matrix sigma_minus();
}  // namespace pauli

}  // namespace ebflow
