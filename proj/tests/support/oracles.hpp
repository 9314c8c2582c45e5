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

// Reference computations for tests. Nothing here calls into the library's
// linear algebra: Choi matrices, partial transposes, spectra and exponentials
// are recomputed from definitions.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;

inline Mat random_complex(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = cplx(n(rng), n(rng));
  return m;
}

inline Mat random_hermitian(int d, std::mt19937_64& rng) {
  const Mat a = random_complex(d, d, rng);
  return a + a.adjoint();
}

/// G G^dagger / tr, full rank with probability one.
inline Mat random_density(int d, std::mt19937_64& rng) {
  const Mat g = random_complex(d, d, rng);
  Mat r = g * g.adjoint();
  return r / r.trace().real();
}

/// Gram-Schmidt on the columns of a random matrix.
inline Mat random_isometry(int rows, int cols, std::mt19937_64& rng) {
  Mat q = random_complex(rows, cols, rng);
  for (int j = 0; j < cols; ++j) {
    for (int k = 0; k < j; ++k) q.col(j) -= q.col(k).dot(q.col(j)) * q.col(k);
    q.col(j) /= q.col(j).norm();
  }
  return q;
}

/// Kraus operators of a random CPTP map with `k` terms.
inline std::vector<Mat> random_kraus(int d, int k, std::mt19937_64& rng) {
  const Mat v = random_isometry(d * k, d, rng);
  std::vector<Mat> out;
  for (int i = 0; i < k; ++i) out.push_back(v.block(i * d, 0, d, d));
  return out;
}

/// Action of a map given by its d^2 x d^2 column-stacked matrix.
inline Mat act(const Mat& sup, const Mat& x) {
  const int d = static_cast<int>(x.rows());
  Eigen::VectorXcd v(d * d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) v(i + j * d) = x(i, j);
  const Eigen::VectorXcd w = sup * v;
  Mat y(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) y(i, j) = w(i + j * d);
  return y;
}

/// Column-stacked matrix of X -> sum_k K_k X K_k^dagger, built entrywise.
inline Mat kraus_superop(const std::vector<Mat>& kraus) {
  const int d = static_cast<int>(kraus.front().rows());
  Mat s = Mat::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Mat e = Mat::Zero(d, d);
      e(i, j) = 1.0;
      Mat y = Mat::Zero(d, d);
      for (const Mat& k : kraus) y += k * e * k.adjoint();
      for (int b = 0; b < d; ++b)
        for (int a = 0; a < d; ++a) s(a + b * d, i + j * d) = y(a, b);
    }
  return s;
}

/// Choi matrix sum_ij E_ij (x) phi(E_ij), assembled entry by entry.
inline Mat choi(const Mat& sup, int d) {
  Mat c(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Mat e = Mat::Zero(d, d);
      e(i, j) = 1.0;
      const Mat y = act(sup, e);
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) c(i * d + a, j * d + b) = y(a, b);
    }
  return c;
}

/// Transpose of the second tensor factor by index relabelling.
inline Mat partial_transpose(const Mat& m, int d1, int d2) {
  Mat out(m.rows(), m.cols());
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < d1; ++j)
      for (int a = 0; a < d2; ++a)
        for (int b = 0; b < d2; ++b) out(i * d2 + a, j * d2 + b) = m(i * d2 + b, j * d2 + a);
  return out;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      for (int k = 0; k < b.rows(); ++k)
        for (int l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

/// Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations on the real
/// embedding [[Re, -Im], [Im, Re]]; each eigenvalue appears twice there and
/// is returned once, ascending.
inline std::vector<double> jacobi_eigenvalues(const Mat& h) {
  const int n = static_cast<int>(h.rows());
  RMat a(2 * n, 2 * n);
  const Mat hs = 0.5 * (h + h.adjoint());
  a << hs.real(), -hs.imag(), hs.imag(), hs.real();
  const int m = 2 * n;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < m; ++p)
      for (int q = p + 1; q < m; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30 * std::max(1.0, a.squaredNorm())) break;
    for (int p = 0; p < m; ++p)
      for (int q = p + 1; q < m; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < m; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < m; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> ev(m);
  for (int i = 0; i < m; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end());
  std::vector<double> out;
  for (int i = 0; i < m; i += 2) out.push_back(0.5 * (ev[i] + ev[i + 1]));
  return out;
}

inline double min_eig(const Mat& h) { return jacobi_eigenvalues(h).front(); }

/// Term-wise Taylor series summed until the terms stop changing the sum.
inline Mat taylor_expm(const Mat& m) {
  // Halve until the norm is below 1/2, then square back.
  int s = 0;
  double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  while (norm > 0.5) {
    norm /= 2.0;
    ++s;
  }
  const Mat a = m / std::pow(2.0, s);
  Mat sum = Mat::Identity(m.rows(), m.cols());
  Mat term = sum;
  for (int k = 1; k < 200; ++k) {
    term = term * a / double(k);
    const Mat next = sum + term;
    if ((next - sum).norm() == 0.0) break;
    sum = next;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

/// Probability vector uniform on the simplex.
inline std::vector<double> simplex_sample(int n, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(n);
  double s = 0.0;
  for (double& x : p) s += (x = e(rng));
  for (double& x : p) x /= s;
  return p;
}

}  // namespace oracle
