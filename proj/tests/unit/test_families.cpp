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

#include <gtest/gtest.h>

#include <random>

#include "ebflow/asymptotics.hpp"
#include "ebflow/errors.hpp"
#include "ebflow/evolve.hpp"
#include "ebflow/families.hpp"
#include "../support/oracles.hpp"

using namespace ebflow;

namespace {

RateFunction rc(double v) { return RateFunction::constant_rate(v); }

Matrix diag_of(const std::vector<double>& w) {
  Matrix m = Matrix::Zero(static_cast<int>(w.size()), static_cast<int>(w.size()));
  for (std::size_t i = 0; i < w.size(); ++i) m(i, i) = w[i];
  return m;
}

/// Normalised kernel vector of a generator, by SVD.
Matrix kernel_state(const Superoperator& l) {
  Eigen::JacobiSVD<Matrix> svd(l.matrix(), Eigen::ComputeFullV);
  const int n = static_cast<int>(svd.singularValues().size());
  const Matrix k = unvec(svd.matrixV().col(n - 1), l.dim());
  return k / k.trace();
}

template <class F>
ErrorKind error_kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::ConfigError;  // sentinel: nothing thrown
}

}  // namespace

TEST(Gkls, AmplitudeDampingKernel) {
  const GeneratorFamily fam = gkls(Matrix::Zero(2, 2), {{pauli::sigma_minus(), rc(1.0)}});
  const Matrix k = kernel_state(fam.evaluate(0.0));
  EXPECT_NEAR(std::abs(k(0, 0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(k(1, 1) - 1.0), 0.0, 1e-12);
}

TEST(Gkls, TraceAnnihilation) {
  std::mt19937_64 rng(31);
  const GeneratorFamily fam = gkls(oracle::random_hermitian(3, rng),
                                   {{oracle::random_complex(3, 3, rng), rc(0.7)},
                                    {oracle::random_complex(3, 3, rng), rc(0.2)}});
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      EXPECT_NEAR(std::abs(ebflow::apply(fam.evaluate(0.0), matrix_unit(3, i, j)).trace()), 0.0, 1e-13);
  EXPECT_TRUE(fam.traits().constant);
  EXPECT_TRUE(fam.traits().cp_divisible);
}

TEST(Gkls, RejectsNonHermitianHamiltonian) {
  Matrix h = Matrix::Zero(2, 2);
  h(0, 1) = 1.0;
  EXPECT_EQ(error_kind_of([&] { gkls(h, {}); }), ErrorKind::NonHermitianHamiltonian);
}

TEST(Pauli, IsotropicEigenvalues) {
  const GeneratorFamily fam = pauli_channel(rc(1), rc(1), rc(1));
  for (double t : {0.2, 1.0}) {
    const Superoperator lam = solve(fam, t);
    for (int k = 1; k <= 3; ++k) {
      const Matrix s = pauli::sigma(k);
      EXPECT_NEAR((0.5 * s * ebflow::apply(lam, s)).trace().real(), std::exp(-4 * t), 1e-13);
    }
    EXPECT_NEAR(ebflow::apply(lam, Matrix::Identity(2, 2)).trace().real(), 2.0, 1e-14);
  }
}

TEST(Pauli, OppositeRatesWitness) {
  const double c = 0.4, g3 = 0.9;
  const GeneratorFamily fam = pauli_channel(rc(c), rc(-c), rc(g3));
  for (double t : {0.5, 2.0, 7.0}) {
    const oracle::Mat choi = oracle::choi(solve(fam, t).matrix(), 2);
    EXPECT_NEAR(oracle::min_eig(choi), -std::exp(-2 * g3 * t) * std::sinh(2 * c * t), 1e-12);
  }
}

TEST(Pauli, DegenerateLimitSpectrum) {
  const AsymptoticMap lim = asymptotic_map(pauli_channel(rc(1.0), rc(-1.0), rc(1.0)));
  const std::vector<double> ev = oracle::jacobi_eigenvalues(oracle::choi(lim.limit.matrix(), 2));
  const std::vector<double> ref = {-0.5, 0.5, 0.5, 1.5};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(ev[i], ref[i], 1e-10);
}

TEST(Pauli, PDivisibility) {
  const std::vector<double> grid = {0.0, 1.0, 2.0};
  EXPECT_TRUE(pauli_p_divisible(rc(1), rc(0.5), rc(-0.4), grid));
  EXPECT_FALSE(pauli_p_divisible(rc(1), rc(-0.5), rc(-0.6), grid));
}

TEST(PhaseCovariant, InitialSlopeAndClosedLambdaMin) {
  PhaseCovariantParams p;
  p.gamma_plus = 1.2;
  p.gamma_minus = 0.9;
  p.gamma_z = 0.3;
  const GeneratorFamily fam = phase_covariant(p);
  const double h = 1e-7;
  const double l0 = oracle::min_eig(oracle::choi(solve(fam, 0.0).matrix(), 2));
  const double lh = oracle::min_eig(oracle::choi(solve(fam, h).matrix(), 2));
  EXPECT_NEAR(l0, 0.0, 1e-13);
  EXPECT_NEAR((lh - l0) / h, 2 * p.gamma_z, 1e-5);

  PhaseCovariantParams q;
  q.gamma_plus = q.gamma_minus = 0.7;
  q.gamma_z = -0.35;
  const GeneratorFamily g = phase_covariant(q);
  for (double t : {0.3, 1.1, 4.0}) {
    const double lm = oracle::min_eig(oracle::choi(solve(g, t).matrix(), 2));
    EXPECT_NEAR(lm, 0.5 * (std::exp(-2 * q.gamma_plus * t) - 1.0), 1e-12);
    EXPECT_NEAR(phase_covariant_block_min(q, t), lm, 1e-12);
  }
  EXPECT_TRUE(g.diagnostics().empty());  // gamma_z + sqrt(gamma_+ gamma_-)/2 = 0: on the edge
  PhaseCovariantParams r = q;
  r.gamma_z = -0.5;
  EXPECT_FALSE(phase_covariant(r).diagnostics().empty());
}

TEST(PhaseCovariant, StationaryState) {
  PhaseCovariantParams p;
  p.omega = 0.8;
  p.gamma_plus = 0.5;
  p.gamma_minus = 1.5;
  const GeneratorFamily fam = phase_covariant(p);
  const auto [pp, pm] = phase_covariant_populations(p);
  EXPECT_NEAR(pp, 0.25, 1e-15);
  EXPECT_NEAR(pm, 0.75, 1e-15);
  std::mt19937_64 rng(32);
  const Matrix out = ebflow::apply(solve(fam, 80.0), oracle::random_density(2, rng));
  EXPECT_LE((out - diag_of({pp, pm})).norm(), 1e-12);
  EXPECT_LE((kernel_state(fam.evaluate(0.0)) - diag_of({pp, pm})).norm(), 1e-10);
}

TEST(EternalNm, LimitSpectraAndPropagator) {
  for (double alpha : {1.0, 2.0, 3.0}) {
    const AsymptoticMap lim = asymptotic_map(eternal_nm(alpha));
    const std::vector<double> ev = oracle::jacobi_eigenvalues(oracle::choi(lim.limit.matrix(), 2));
    const double q = std::pow(2.0, -alpha);
    EXPECT_NEAR(ev[0], 0.5 - q, 1e-10);
    EXPECT_NEAR(ev[1], 0.5, 1e-10);
    EXPECT_NEAR(ev[2], 0.5, 1e-10);
    EXPECT_NEAR(ev[3], 0.5 + q, 1e-10);
  }
  const EvolutionHandle h(eternal_nm(2.0));
  for (double s : {0.5, 1.0, 2.0}) {
    const double w = oracle::min_eig(oracle::choi(h.propagator(45.0, s).matrix(), 2));
    EXPECT_NEAR(w, eternal_nm_propagator_limit(2.0, s), 1e-8);
    EXPECT_NEAR(eternal_nm_propagator_limit(2.0, s),
                0.5 - 0.25 * std::exp(2 * s) / std::pow(std::cosh(s), 2), 1e-15);
  }
  EXPECT_FALSE(eternal_nm(2.0).traits().cp_divisible);
}

TEST(Depolarizing, PartialTransposeEigenvaluesMatchDenseSolve) {
  std::mt19937_64 rng(33);
  for (int d : {2, 3, 4}) {
    const oracle::Mat omega = diag_of(oracle::simplex_sample(d, rng));
    const std::vector<double> w = oracle::jacobi_eigenvalues(omega);
    const GeneratorFamily fam = depolarizing(0.8, omega);
    for (double t : {0.2, 1.0, 3.0}) {
      std::vector<double> mine = depolarizing_pt_eigenvalues(0.8, w, t);
      std::sort(mine.begin(), mine.end());
      const std::vector<double> ref =
          oracle::jacobi_eigenvalues(oracle::partial_transpose(oracle::choi(solve(fam, t).matrix(), d), d, d));
      ASSERT_EQ(mine.size(), ref.size());
      for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(mine[i], ref[i], 1e-9);
    }
  }
}

TEST(Depolarizing, TauPptClosedForm) {
  // Root of (e^{gt} - 1)^2 w_i w_j = 1 for the smallest pair product.
  for (int d = 2; d <= 4; ++d) {
    const std::vector<double> w(d, 1.0 / d);
    EXPECT_NEAR(depolarizing_tau_ppt(1.0, w), std::log(d + 1.0), 1e-14);
    EXPECT_NEAR(depolarizing_tau_ppt(2.0, w), std::log(d + 1.0) / 2.0, 1e-14);
  }
  EXPECT_NEAR(depolarizing_tau_ppt(1.0, {0.9, 0.1}), std::log(13.0 / 3.0), 1e-14);
  EXPECT_TRUE(std::isinf(depolarizing_tau_ppt(1.0, {1.0, 0.0})));
}

TEST(Depolarizing, InvalidState) {
  EXPECT_EQ(error_kind_of([] { depolarizing(1.0, diag_of({0.6, 0.6})); }), ErrorKind::InvalidState);
  EXPECT_EQ(error_kind_of([] { depolarizing(1.0, diag_of({1.2, -0.2})); }), ErrorKind::InvalidState);
}

TEST(DetailedBalance, GibbsKernel) {
  const double E = 1.3;
  Matrix H = diag_of({0.0, E});
  for (double beta : {0.0, 0.5, 2.0}) {
    const GeneratorFamily fam = detailed_balance(H, {{pauli::sigma_minus(), -E}}, beta);
    const Matrix k = kernel_state(fam.evaluate(0.0));
    const double z = 1.0 + std::exp(-beta * E);
    EXPECT_LE((k - diag_of({1.0 / z, std::exp(-beta * E) / z})).norm(), 1e-10);
    EXPECT_LE((gibbs_state(H, beta) - k).norm(), 1e-10);
  }
  std::mt19937_64 rng(34);
  const GeneratorFamily fam = detailed_balance(H, {{pauli::sigma_minus(), -E}}, 0.7);
  const Matrix out = ebflow::apply(solve(fam, 60.0), oracle::random_density(2, rng));
  EXPECT_LE((out - gibbs_state(H, 0.7)).norm(), 1e-10);
}

TEST(DetailedBalance, CovarianceViolation) {
  const Matrix H = diag_of({0.0, 1.0});
  EXPECT_EQ(error_kind_of([&] { detailed_balance(H, {{pauli::sigma(1), -1.0}}, 1.0); }),
            ErrorKind::CovarianceViolation);
}

TEST(Floquet, PeriodicityAndStationaryState) {
  auto core = std::make_shared<const GeneratorFamily>(
      gkls(Matrix::Zero(2, 2), {{pauli::sigma_minus(), rc(1.0)}, {pauli::sigma_plus(), rc(0.5)}}));
  const GeneratorFamily fam = floquet_product(pauli::sigma(3) * (M_PI / 2.0), 2.0, core);
  EXPECT_EQ(fam.kind(), FamilyKind::floquet);
  const Superoperator a = solve(fam, 0.7), core_a = solve(*core, 0.7);
  // At a full period the drive is the identity channel.
  EXPECT_LE((solve(fam, 2.0).matrix() - solve(*core, 2.0).matrix()).norm(), 1e-12);
  EXPECT_GT((a.matrix() - core_a.matrix()).norm(), 1e-3);
  EXPECT_EQ(error_kind_of([&] { floquet_product(pauli::sigma(3), 2.0, core); }),
            ErrorKind::InvalidParameter);
}

TEST(PureDecoherence, CutoffKillsCoherences) {
  Matrix a(2, 2);
  a << 1.0, 0.2, 0.2, 1.0;
  const GeneratorFamily fam = pure_decoherence({rc(0.0), rc(1.0)}, MatrixFunction::constant_matrix(a), 1.5);
  const Superoperator before = solve(fam, 1.0), after = solve(fam, 1.6);
  const Matrix x = Matrix::Ones(2, 2);
  EXPECT_GT(std::abs(ebflow::apply(before, x)(0, 1)), 1e-3);
  EXPECT_EQ(ebflow::apply(after, x)(0, 1), cplx(0.0));
  EXPECT_EQ(ebflow::apply(after, x)(0, 0), cplx(1.0));
}

TEST(PureDecoherence, RejectsNonPositiveRateMatrix) {
  Matrix a(2, 2);
  a << 1.0, 3.0, 3.0, 1.0;
  EXPECT_EQ(error_kind_of([&] { pure_decoherence({rc(0), rc(1)}, MatrixFunction::constant_matrix(a)); }),
            ErrorKind::InvalidRateMatrix);
}

TEST(DiagonallyCovariant, CommutesAndMatchesOde) {
  Matrix a(2, 2);
  a << 1.0, 0.3, 0.3, 0.8;
  Matrix b = Matrix::Zero(2, 2);
  b(0, 1) = 0.6;
  b(1, 0) = 0.2;
  const auto fam = std::make_shared<const GeneratorFamily>(diagonally_covariant(
      {rc(0.0), rc(0.4)}, MatrixFunction::constant_matrix(a), MatrixFunction::constant_matrix(b)));
  EXPECT_TRUE(commutes_on(*fam, {0.0, 1.0, 2.0}));
  const EvolutionHandle fast(fam), ode(fam, Solver::ode);
  EXPECT_LE((fast.solve(3.0).matrix() - ode.solve(3.0).matrix()).norm(), 1e-9);
}

TEST(RateFunction, QuadratureFallback) {
  const RateFunction r = RateFunction::from([](double t) { return std::cos(t); });
  EXPECT_NEAR(r.integral(1.3), std::sin(1.3), 1e-10);
  const RateFunction z;
  EXPECT_EQ(z(5.0), 0.0);
  EXPECT_TRUE(z.is_constant());
}

TEST(Catalog, KindNamesRoundTrip) {
  EXPECT_EQ(all_family_kinds().size(), 9u);
  for (FamilyKind k : all_family_kinds()) EXPECT_EQ(family_kind_from_string(to_string(k)), k);
}
