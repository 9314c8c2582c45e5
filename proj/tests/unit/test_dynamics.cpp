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
#include "ebflow/divisibility.hpp"
#include "ebflow/errors.hpp"
#include "ebflow/evolve.hpp"
#include "ebflow/families.hpp"
#include "../support/oracles.hpp"

using namespace ebflow;

namespace {

RateFunction rc(double v) { return RateFunction::constant_rate(v); }

std::shared_ptr<const GeneratorFamily> shared(GeneratorFamily f) {
  return std::make_shared<const GeneratorFamily>(std::move(f));
}

Matrix diag_of(const std::vector<double>& w) {
  Matrix m = Matrix::Zero(static_cast<int>(w.size()), static_cast<int>(w.size()));
  for (std::size_t i = 0; i < w.size(); ++i) m(i, i) = w[i];
  return m;
}

}  // namespace

// ---------------------------------------------------------------- evolve

TEST(Evolve, SolverSelectionAndForcing) {
  EXPECT_EQ(EvolutionHandle(pauli_channel(rc(1), rc(1), rc(1))).solver(), Solver::closed_form);
  EXPECT_EQ(EvolutionHandle(gkls(Matrix::Zero(2, 2), {{pauli::sigma_minus(), rc(1)}})).solver(),
            Solver::commuting_exp);
  try {
    EvolutionHandle(gkls(Matrix::Zero(2, 2), {{pauli::sigma_minus(), rc(1)}}), Solver::closed_form);
    FAIL() << "expected InvalidParameter";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidParameter);
  }
}

TEST(Evolve, SemigroupMatchesExponential) {
  std::mt19937_64 rng(41);
  const auto fam = shared(gkls(oracle::random_hermitian(2, rng),
                               {{oracle::random_complex(2, 2, rng), rc(0.6)}}));
  const EvolutionHandle ode(fam, Solver::ode);
  for (double t : {0.0, 0.5, 2.0}) {
    const Matrix ref = oracle::taylor_expm(fam->evaluate(0.0).matrix() * t);
    EXPECT_LE((ode.solve(t).matrix() - ref).norm(), 1e-9);
  }
}

TEST(Evolve, CacheAndPropagator) {
  const EvolutionHandle h(eternal_nm(1.5), Solver::ode);
  EXPECT_EQ(h.cache_size(), 0u);
  const Superoperator a = h.solve(1.0);
  const Superoperator b = h.solve(2.0);
  EXPECT_GE(h.cache_size(), 2u);
  EXPECT_EQ(h.solve(1.0).matrix(), a.matrix());
  const Superoperator v = h.propagator(2.0, 1.0);
  EXPECT_LE((compose(v, a).matrix() - b.matrix()).norm(), 1e-10);
  EXPECT_LE((h.propagator(1.0, 1.0).matrix() - Matrix::Identity(4, 4)).norm(), 0.0);
  h.clear_cache();
  EXPECT_EQ(h.cache_size(), 0u);
}

TEST(Evolve, FloquetPropagatorStructure) {
  auto core = shared(depolarizing(0.8, diag_of({0.3, 0.7})));
  const EvolutionHandle h(floquet_product(pauli::sigma(3) * (M_PI / 2.0), 2.0, core));
  const Superoperator v = h.propagator(1.7, 0.6);
  EXPECT_LE((compose(v, h.solve(0.6)).matrix() - h.solve(1.7).matrix()).norm(), 1e-12);
}

// ---------------------------------------------------------------- asymptotics

TEST(Asymptotics, DefaultHorizon) {
  EXPECT_NEAR(default_t_max(depolarizing(2.0, diag_of({0.5, 0.5}))), 10.0, 1e-9);
  Matrix a(2, 2);
  a << 1.0, 1.0, 1.0, 1.0;  // no decay at all
  EXPECT_NEAR(default_t_max(pure_decoherence({rc(0), rc(0)}, MatrixFunction::constant_matrix(a))), 20.0, 1e-12);
}

TEST(Asymptotics, NoLimitForUndampedRotation) {
  const GeneratorFamily fam = gkls(pauli::sigma(3), {});
  try {
    asymptotic_map(fam);
    FAIL() << "expected NoLimit";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoLimit);
  }
}

TEST(Asymptotics, PredictorBases) {
  EXPECT_EQ(predict_eventually_eb(depolarizing(1.0, diag_of({0.4, 0.6}))).basis,
            PredictorBasis::spectral_semigroup);
  EXPECT_EQ(predict_eventually_eb(eternal_nm(2.0)).classification, AsymptoticClass::eventually_EB);
  EXPECT_EQ(predict_eventually_eb(eternal_nm(1.0)).classification, AsymptoticClass::asymptotically_EB);
  Matrix a(2, 2);
  a << 1.0, 0.5, 0.5, 1.0;
  const AsymptoticVerdict pd = predict_eventually_eb(
      pure_decoherence({rc(0), rc(1)}, MatrixFunction::constant_matrix(a), 2.0));
  EXPECT_EQ(pd.basis, PredictorBasis::decoherence_corollary);
  auto core = shared(depolarizing(0.8, diag_of({0.3, 0.7})));
  const AsymptoticVerdict fl =
      predict_eventually_eb(floquet_product(pauli::sigma(3) * (M_PI / 2.0), 2.0, core));
  EXPECT_EQ(fl.basis, PredictorBasis::periodic_limit_cycle);
  EXPECT_EQ(fl.classification, AsymptoticClass::eventually_EB);
  // Amplitude damping: pure kernel state, limit on the boundary.
  const AsymptoticVerdict ad = predict_eventually_eb(gkls(Matrix::Zero(2, 2), {{pauli::sigma_minus(), rc(1)}}));
  EXPECT_NE(ad.classification, AsymptoticClass::eventually_EB);
}

TEST(Arrival, DepolarizingQubit) {
  const EvolutionHandle h(depolarizing(1.0, diag_of({0.5, 0.5})));
  const ArrivalResult a = arrival_time(h, Cone::EB);
  EXPECT_EQ(a.kind, TauKind::finite);
  EXPECT_EQ(a.status, ArrivalStatus::ok);
  EXPECT_EQ(a.retention, RetentionCertificate::analytic_monotone);
  EXPECT_NEAR(a.tau, std::log(3.0), 1e-8);
  EXPECT_LE(a.bracket.first, a.tau);
  EXPECT_GE(a.bracket.second, a.tau);
  const ArrivalResult cp = arrival_time(h, Cone::CP);
  EXPECT_EQ(cp.tau, 0.0);
}

TEST(Arrival, QutritEbIsLowerBound) {
  const EvolutionHandle h(depolarizing(1.0, Matrix::Identity(3, 3) / 3.0));
  const ArrivalResult a = arrival_time(h, Cone::EB);
  EXPECT_TRUE(a.lower_bound_only);
  EXPECT_EQ(a.evaluated_cone, Cone::PPT);
  EXPECT_NEAR(a.tau, std::log(4.0), 1e-8);
}

TEST(Arrival, NeverEntering) {
  // The identity channel never becomes PPT; the limit sits outside the cone.
  const EvolutionHandle h(gkls(pauli::sigma(3), {}));
  const ArrivalResult a = arrival_time(h, Cone::PPT);
  EXPECT_EQ(a.status, ArrivalStatus::not_reached);
  EXPECT_NE(a.kind, TauKind::finite);
}

TEST(Arrival, ParallelGridIsDeterministic) {
  const EvolutionHandle h(eternal_nm(2.0));
  ArrivalSearch s1, s4;
  s4.threads = 4;
  const ArrivalResult a = arrival_time(h, Cone::EB, s1);
  const ArrivalResult b = arrival_time(h, Cone::EB, s4);
  EXPECT_EQ(a.tau, b.tau);
  EXPECT_EQ(a.bracket, b.bracket);
}

TEST(Compositions, DepolarizingPowers) {
  const Superoperator phi = solve(depolarizing(1.0, diag_of({0.5, 0.5})), 0.5);
  const CompositionExperiment ex = ppt_composition_experiment(phi, 6);
  ASSERT_EQ(ex.steps.size(), 6u);
  ASSERT_TRUE(ex.first_eb.has_value());
  // phi^n = Lambda_{n/2}; EB from n/2 >= ln 3.
  EXPECT_EQ(*ex.first_eb, 3);
}

TEST(Lemmas, IntervalCover) {
  EXPECT_EQ(interval_cover_threshold(2.0, 3.0), 4.0);
  EXPECT_EQ(interval_cover_threshold(3.0, 4.0), 9.0);
  EXPECT_EQ(interval_cover_threshold(1.0, 5.0), 1.0);
  for (auto [a, b] : {std::pair{0.0, 1.0}, std::pair{2.0, 2.0}, std::pair{3.0, 1.0}}) {
    try {
      interval_cover_threshold(a, b);
      FAIL() << "expected InvalidInterval";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidInterval);
    }
  }
}

TEST(Lemmas, PairwiseProduct) {
  EXPECT_DOUBLE_EQ(max_min_pairwise_product({0.5, 0.5}), 0.25);
  EXPECT_NEAR(max_min_pairwise_product({0.2, 0.3, 0.5}), 0.06, 1e-15);
  for (const std::vector<double>& bad : std::vector<std::vector<double>>{{1.0}, {0.6, 0.6}, {1.2, -0.2}}) {
    try {
      max_min_pairwise_product(bad);
      FAIL() << "expected NotAProbabilityVector";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::NotAProbabilityVector);
    }
  }
}

// ---------------------------------------------------------------- divisibility

TEST(Divisibility, DefaultGrid) {
  const std::vector<double> g = default_s_grid(20.0);
  ASSERT_EQ(g.size(), 16u);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_NEAR(g[1], 1e-2, 1e-15);
  EXPECT_NEAR(g.back(), 10.0, 1e-12);
  for (std::size_t i = 2; i < g.size(); ++i) EXPECT_NEAR(g[i] / g[i - 1], g[2] / g[1], 1e-12);
}

TEST(Divisibility, SemigroupShortcutAgreesWithDirectPath) {
  const EvolutionHandle h(depolarizing(1.0, diag_of({0.3, 0.7})));
  DivisibilityOptions fast, slow;
  fast.s_grid = slow.s_grid = {0.0, 0.4, 2.0};
  slow.use_shortcuts = false;
  const DivisibilityReport a = scan_divisibility(h, Cone::EB, fast);
  const DivisibilityReport b = scan_divisibility(h, Cone::EB, slow);
  EXPECT_EQ(a.shortcut_used, DivisibilityShortcut::semigroup);
  EXPECT_EQ(b.shortcut_used, DivisibilityShortcut::none);
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    ASSERT_TRUE(a.entries[i].delta && b.entries[i].delta);
    EXPECT_NEAR(*a.entries[i].delta, *b.entries[i].delta, 1e-7);
  }
}

TEST(Divisibility, EternalRefutedAndChainConsistent) {
  const EvolutionHandle h(eternal_nm(2.0));
  std::vector<DivisibilityReport> reps;
  for (Cone c : {Cone::CP, Cone::PPT, Cone::EB}) reps.push_back(scan_divisibility(h, c));
  for (const auto& r : reps) EXPECT_EQ(r.verdict, DivisibilityVerdict::refuted);
  EXPECT_TRUE(check_implication_chain(reps).consistent);
}

TEST(Divisibility, ChainFlagsContradiction) {
  DivisibilityReport strong, weak;
  strong.cone = Cone::EB;
  strong.verdict = DivisibilityVerdict::eX_divisible_certified;
  weak.cone = Cone::CP;
  weak.verdict = DivisibilityVerdict::refuted;
  const ChainCheck c = check_implication_chain({strong, weak});
  EXPECT_FALSE(c.consistent);
  EXPECT_FALSE(c.violations.empty());
}
