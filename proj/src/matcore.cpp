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

#include "ebflow/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "ebflow/errors.hpp"

namespace ebflow {

namespace {

constexpr double kEigenbasisConditionLimit = 1e6;

void require_square(const Matrix& m, const char* op) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(op) + " requires a non-empty square matrix, got " +
                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace

double norm_inf(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double herm_tol(const Matrix& m) { return 1e-10 * std::max(1.0, norm_inf(m)); }

double hermiticity_defect(const Matrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const Matrix& m) { return hermiticity_defect(m) <= herm_tol(m); }

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

HermEig herm_eig(const Matrix& m) {
  require_square(m, "herm_eig");
  const double defect = hermiticity_defect(m);
  if (defect > herm_tol(m)) {
    throw Error(ErrorKind::NotHermitian,
                "hermiticity defect " + std::to_string(defect) + " exceeds tolerance");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(m));
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NoConvergence, "Hermitian eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double min_eigenvalue(const Matrix& m) {
  require_square(m, "min_eigenvalue");
  const double defect = hermiticity_defect(m);
  if (defect > herm_tol(m)) {
    throw Error(ErrorKind::NotHermitian,
                "hermiticity defect " + std::to_string(defect) + " exceeds tolerance");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(m), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NoConvergence, "Hermitian eigensolver did not converge");
  }
  return solver.eigenvalues()(0);
}

double condition_number(const Matrix& m) {
  require_square(m, "condition_number");
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

Matrix expm(const Matrix& m) {
  require_square(m, "expm");
  if (!all_finite(m)) {
    throw Error(ErrorKind::NoConvergence, "expm input has non-finite entries");
  }
  if (m.cwiseAbs().maxCoeff() == 0.0) {
    return Matrix::Identity(m.rows(), m.cols());
  }

  Eigen::ComplexEigenSolver<Matrix> eig(m);
  Matrix result;
  bool done = false;
  if (eig.info() == Eigen::Success) {
    Matrix v = eig.eigenvectors();
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      const double n = v.col(j).norm();
      if (n > 0.0) v.col(j) /= n;
    }
    if (condition_number(v) < kEigenbasisConditionLimit) {
      const Vector e = eig.eigenvalues().array().exp();
      // V diag(e) V^{-1} as a solve against V^T to avoid forming the inverse.
      const Matrix scaled = v * e.asDiagonal();
      result = v.transpose().partialPivLu().solve(scaled.transpose()).transpose();
      done = true;
    }
  }
  if (!done) {
    result = m.exp();
  }
  if (!all_finite(result)) {
    throw Error(ErrorKind::NoConvergence, "expm produced non-finite entries");
  }
  return result;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix partial_transpose_second(const Matrix& m, int d1, int d2) {
  if (d1 < 1 || d2 < 1 || m.rows() != d1 * d2 || m.cols() != d1 * d2) {
    throw Error(ErrorKind::DimensionMismatch,
                "partial_transpose_second: matrix is " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()) + ", expected " + std::to_string(d1 * d2));
  }
  Matrix out(m.rows(), m.cols());
  for (int i = 0; i < d1; ++i) {
    for (int j = 0; j < d1; ++j) {
      out.block(i * d2, j * d2, d2, d2) = m.block(i * d2, j * d2, d2, d2).transpose();
    }
  }
  return out;
}

Matrix matrix_unit(int d, int i, int j) {
  Matrix e = Matrix::Zero(d, d);
  e(i, j) = 1.0;
  return e;
}

namespace pauli {

Matrix sigma(int k) {
  Matrix s(2, 2);
  switch (k) {
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case 3: s << 1, 0, 0, -1; break;
    default: s = Matrix::Identity(2, 2); break;
  }
  return s;
}

Matrix sigma_plus() { return 0.5 * (sigma(1) + cplx(0, 1) * sigma(2)); }
Matrix sigma_minus() { return 0.5 * (sigma(1) - cplx(0, 1) * sigma(2)); }

}  // namespace pauli

}  // namespace ebflow
