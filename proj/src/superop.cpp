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

#include "ebflow/superop.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "ebflow/errors.hpp"

namespace ebflow {

namespace {

void require_same_dim(const Superoperator& a, const Superoperator& b, const char* op) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorKind::DimensionMismatch, std::string(op) + ": dimensions " +
                                                  std::to_string(a.dim()) + " and " +
                                                  std::to_string(b.dim()));
  }
}

}  // namespace

Vector vec(const Matrix& x) {
  return Eigen::Map<const Vector>(x.data(), x.size());
}

Matrix unvec(const Vector& v, int d) {
  if (v.size() != static_cast<Eigen::Index>(d) * d) {
    throw Error(ErrorKind::DimensionMismatch, "unvec: vector length is not d^2");
  }
  return Eigen::Map<const Matrix>(v.data(), d, d);
}

Superoperator::Superoperator(int d, Matrix matrix) : d_(d), m_(std::move(matrix)) {
  if (d < 1 || m_.rows() != d * d || m_.cols() != d * d) {
    throw Error(ErrorKind::DimensionMismatch,
                "superoperator on M_" + std::to_string(d) + " needs a " +
                    std::to_string(d * d) + "x" + std::to_string(d * d) + " matrix");
  }
}

Superoperator Superoperator::identity(int d) {
  return {d, Matrix::Identity(d * d, d * d)};
}

Superoperator Superoperator::zero(int d) { return {d, Matrix::Zero(d * d, d * d)}; }

Superoperator Superoperator::transpose(int d) {
  Matrix m = Matrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      // E_ij (index i + j d) -> E_ji (index j + i d)
      m(j + i * d, i + j * d) = 1.0;
    }
  }
  return {d, m};
}

Superoperator Superoperator::sandwich(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "sandwich: operands must be square and equal-sized");
  }
  return {static_cast<int>(a.rows()), kron(b.transpose(), a)};
}

Superoperator Superoperator::conjugation(const Matrix& k) {
  return sandwich(k, k.adjoint());
}

Superoperator Superoperator::from_kraus(const std::vector<Matrix>& kraus) {
  if (kraus.empty()) {
    throw Error(ErrorKind::InvalidParameter, "from_kraus: empty Kraus list");
  }
  Superoperator out = zero(static_cast<int>(kraus.front().rows()));
  for (const auto& k : kraus) out = out + conjugation(k);
  return out;
}

Superoperator Superoperator::operator+(const Superoperator& o) const {
  require_same_dim(*this, o, "operator+");
  return {d_, m_ + o.m_};
}

Superoperator Superoperator::operator-(const Superoperator& o) const {
  require_same_dim(*this, o, "operator-");
  return {d_, m_ - o.m_};
}

Superoperator Superoperator::operator*(cplx s) const { return {d_, s * m_}; }

Matrix apply(const Superoperator& phi, const Matrix& x) {
  if (x.rows() != phi.dim() || x.cols() != phi.dim()) {
    throw Error(ErrorKind::DimensionMismatch,
                "apply: operand is " + std::to_string(x.rows()) + "x" +
                    std::to_string(x.cols()) + ", map acts on M_" + std::to_string(phi.dim()));
  }
  return unvec(phi.matrix() * vec(x), phi.dim());
}

Superoperator compose(const Superoperator& phi, const Superoperator& psi) {
  require_same_dim(phi, psi, "compose");
  return {phi.dim(), phi.matrix() * psi.matrix()};
}

Superoperator power(const Superoperator& phi, int n) {
  if (n < 0) throw Error(ErrorKind::InvalidParameter, "power: negative exponent");
  Superoperator result = Superoperator::identity(phi.dim());
  Superoperator base = phi;
  while (n > 0) {
    if (n & 1) result = compose(result, base);
    n >>= 1;
    if (n > 0) base = compose(base, base);
  }
  return result;
}

ChoiMatrix to_choi(const Superoperator& phi) {
  const int d = phi.dim();
  Matrix c(d * d, d * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const Vector image = phi.matrix().col(i + j * d);
      c.block(i * d, j * d, d, d) = unvec(image, d);
    }
  }
  return {d, c};
}

Superoperator from_choi(const ChoiMatrix& c) {
  const int d = c.d;
  if (d < 1 || c.matrix.rows() != d * d || c.matrix.cols() != d * d) {
    throw Error(ErrorKind::DimensionMismatch, "from_choi: Choi matrix has wrong size");
  }
  Matrix m(d * d, d * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      m.col(i + j * d) = vec(c.matrix.block(i * d, j * d, d, d));
    }
  }
  return {d, m};
}

Superoperator adjoint(const Superoperator& phi) { return {phi.dim(), phi.matrix().adjoint()}; }

bool is_trace_preserving(const Superoperator& phi, double tol) {
  // tr(phi(X)) = vec(I)^dagger Phi vec(X) for all X  <=>  Phi^dagger vec(I) = vec(I).
  const int d = phi.dim();
  const Vector id = vec(Matrix::Identity(d, d));
  return (phi.matrix().adjoint() * id - id).cwiseAbs().maxCoeff() <= tol;
}

bool is_unital(const Superoperator& phi, double tol) {
  const int d = phi.dim();
  const Vector id = vec(Matrix::Identity(d, d));
  return (phi.matrix() * id - id).cwiseAbs().maxCoeff() <= tol;
}

Superoperator inverse(const Superoperator& phi, double cond_limit) {
  const double cond = condition_number(phi.matrix());
  if (!(cond <= cond_limit)) {
    throw Error(ErrorKind::SingularMap,
                "map is numerically non-invertible (condition number " + std::to_string(cond) +
                    ")");
  }
  const int n = phi.dim() * phi.dim();
  return {phi.dim(), phi.matrix().fullPivLu().solve(Matrix::Identity(n, n))};
}

double sup_distance(const Superoperator& phi, const Superoperator& psi) {
  require_same_dim(phi, psi, "sup_distance");
  return std::sqrt(static_cast<double>(phi.dim())) * spectral_norm(phi.matrix() - psi.matrix());
}

cplx hs_inner(const Matrix& a, const Matrix& b) { return (a.adjoint() * b).trace(); }

Superoperator MapSpectrum::projector(std::size_t i) const {
  const int d = static_cast<int>(right.at(i).rows());
  return {d, vec(right[i]) * vec(left[i]).adjoint()};
}

MapSpectrum map_spectrum(const Superoperator& phi, double cond_limit) {
  const int d = phi.dim();
  Eigen::ComplexEigenSolver<Matrix> solver(phi.matrix());
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NoConvergence, "map_spectrum: eigensolver did not converge");
  }
  Matrix r = solver.eigenvectors();
  for (Eigen::Index j = 0; j < r.cols(); ++j) r.col(j).normalize();

  MapSpectrum out;
  out.condition = condition_number(r);
  if (!(out.condition <= cond_limit)) {
    throw Error(ErrorKind::Defective, "map_spectrum: eigenvector condition number " +
                                          std::to_string(out.condition) + " exceeds limit");
  }
  // Rows of R^{-1} are the dual basis; vec(Y_i) is the conjugate of row i.
  const Matrix rinv = r.fullPivLu().inverse();
  out.eigenvalues = solver.eigenvalues();
  const Eigen::Index n = r.cols();
  out.right.reserve(n);
  out.left.reserve(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.right.push_back(unvec(r.col(i), d));
    out.left.push_back(unvec(rinv.row(i).adjoint(), d));
  }
  double residual = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const cplx g = hs_inner(out.left[i], out.right[j]);
      residual = std::max(residual, std::abs(g - (i == j ? 1.0 : 0.0)));
    }
  }
  out.biorthogonality_residual = residual;
  return out;
}

}  // namespace ebflow
