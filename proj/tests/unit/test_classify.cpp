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

#include "ebflow/classify.hpp"
#include "ebflow/errors.hpp"
#include "ebflow/evolve.hpp"
#include "ebflow/families.hpp"
#include "../support/oracles.hpp"

using namespace ebflow;

namespace {

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

TEST(Classify, TransposeMap) {
  const ClassificationReport r = classify_map(Superoperator::transpose(2));
  EXPECT_FALSE(r.is_cp);
  EXPECT_TRUE(r.is_cocp);
  EXPECT_NEAR(r.min_eig_choi, -1.0, 1e-14);
  EXPECT_EQ(r.eb_status, EbStatus::EB_refuted);
}

TEST(Classify, IdentityIsNotPpt) {
  const GeneratorFamily fam = pauli_channel(RateFunction::constant_rate(1), RateFunction::constant_rate(1),
                                            RateFunction::constant_rate(1));
  const ClassificationReport r = classify_map(solve(fam, 0.0));
  EXPECT_TRUE(r.is_cp);
  EXPECT_FALSE(r.is_ppt);
  EXPECT_EQ(r.eb_status, EbStatus::EB_refuted);
}

TEST(Classify, AmplitudeDampingPartialTransposeWitness) {
  PhaseCovariantParams p;
  p.gamma_minus = 0.8;
  const GeneratorFamily fam = phase_covariant(p);
  for (double t : {0.1, 1.0, 3.0}) {
    const ClassificationReport r = classify_map(solve(fam, t));
    EXPECT_NEAR(r.min_eig_choi_pt, -std::exp(-t * p.gamma_minus), 1e-12);
  }
}

TEST(Classify, WitnessesMatchOracle) {
  std::mt19937_64 rng(21);
  for (int d : {2, 3}) {
    const Superoperator phi(d, oracle::kraus_superop(oracle::random_kraus(d, 2, rng)));
    const ChoiWitnesses w = choi_witnesses(phi);
    const oracle::Mat c = oracle::choi(phi.matrix(), d);
    EXPECT_NEAR(w.choi, oracle::min_eig(c), 1e-12);
    EXPECT_NEAR(w.choi_pt, oracle::min_eig(oracle::partial_transpose(c, d, d)), 1e-12);
  }
}

TEST(Classify, NonHermitianChoiRejected) {
  std::mt19937_64 rng(22);
  const Superoperator phi(2, oracle::random_complex(4, 4, rng));
  try {
    classify_map(phi);
    FAIL() << "expected NotHermitian";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotHermitian);
  }
}

TEST(InteriorCertificate, StateProjectors) {
  const InteriorCertificate a = eb_certify_interior(projector_onto_state(diag2(0.5, 0.5)));
  EXPECT_TRUE(a.certified);
  const InteriorCertificate b = eb_certify_interior(projector_onto_state(diag2(1.0, 0.0)));
  EXPECT_FALSE(b.certified);
  EXPECT_TRUE(b.on_boundary);
}

TEST(InteriorCertificate, EternalLimit) {
  const GeneratorFamily fam = eternal_nm(2.0);
  const InteriorCertificate c = eb_certify_interior(solve(fam, 60.0));
  EXPECT_TRUE(c.certified);
  EXPECT_EQ(c.path, InteriorPath::strict_ppt_qubit);
}

TEST(InteriorCertificate, QutritBall) {
  const Matrix omega = Matrix::Identity(3, 3) / 3.0;
  const Superoperator p = projector_onto_state(omega);
  const InteriorCertificate c = eb_certify_interior(p);
  EXPECT_TRUE(c.certified);
  EXPECT_EQ(c.path, InteriorPath::state_projector_ball);
  EXPECT_NEAR(c.radius, 1.0 / 6.0, 1e-12);
  // The identity channel is far outside any ball.
  EXPECT_FALSE(eb_certify_interior(Superoperator::identity(3)).certified);
}

TEST(InteriorCertificate, BallPerturbationsStayEb) {
  std::mt19937_64 rng(23);
  const Matrix omega = diag2(0.3, 0.7);
  const Superoperator p = projector_onto_state(omega);
  const double r = eb_certify_interior(p).radius;
  ASSERT_GT(r, 0.0);
  for (int k = 0; k < 50; ++k) {
    // Hermiticity-preserving, trace-preserving perturbation of the Choi matrix.
    oracle::Mat h = oracle::random_hermitian(4, rng);
    oracle::Mat hp = h;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        cplx tr = h(2 * i, 2 * j) + h(2 * i + 1, 2 * j + 1);
        hp(2 * i, 2 * j) -= tr / 2.0;
        hp(2 * i + 1, 2 * j + 1) -= tr / 2.0;
      }
    hp *= 0.9 * r / hp.norm();
    const ChoiMatrix c{2, to_choi(p).matrix + hp};
    EXPECT_EQ(classify_map(from_choi(c)).eb_status, EbStatus::EB_certified);
  }
}

TEST(ProjectorOntoState, Properties) {
  const Matrix omega = diag2(0.4, 0.6);
  const Superoperator p = projector_onto_state(omega);
  EXPECT_LE((compose(p, p).matrix() - p.matrix()).norm(), 1e-15);
  try {
    projector_onto_state(diag2(0.4, 0.4));
    FAIL() << "expected TraceNotOne";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TraceNotOne);
  }
}

TEST(Cone, NamesRoundTrip) {
  for (Cone c : {Cone::P, Cone::CP, Cone::coCP, Cone::PPT, Cone::EB}) {
    EXPECT_EQ(cone_from_string(to_string(c)), c);
  }
}
