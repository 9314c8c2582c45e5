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

#include "ebflow/classify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "ebflow/errors.hpp"

namespace ebflow {

std::string_view to_string(Cone cone) {
  switch (cone) {
    case Cone::P: return "P";
    case Cone::CP: return "CP";
    case Cone::coCP: return "coCP";
    case Cone::PPT: return "PPT";
    case Cone::EB: return "EB";
  }
  return "?";
}

Cone cone_from_string(std::string_view name) {
  if (name == "P") return Cone::P;
  if (name == "CP") return Cone::CP;
  if (name == "coCP") return Cone::coCP;
  if (name == "PPT") return Cone::PPT;
  if (name == "EB") return Cone::EB;
  throw Error(ErrorKind::InvalidParameter, "unknown cone '" + std::string(name) + "'");
}

std::string_view to_string(EbStatus status) {
  switch (status) {
    case EbStatus::EB_certified: return "EB_certified";
    case EbStatus::EB_refuted: return "EB_refuted";
    case EbStatus::EB_unknown: return "EB_unknown";
  }
  return "?";
}

std::string_view to_string(InteriorPath path) {
  switch (path) {
    case InteriorPath::none: return "none";
    case InteriorPath::strict_ppt_qubit: return "strict_ppt_qubit";
    case InteriorPath::state_projector_ball: return "state_projector_ball";
  }
  return "?";
}

namespace {

Matrix checked_hermitian_choi(const Superoperator& phi) {
  const Matrix c = to_choi(phi).matrix;
  const double defect = hermiticity_defect(c);
  if (defect > 10.0 * psd_tol * std::max(1.0, norm_inf(c))) {
    throw Error(ErrorKind::NotHermitian,
                "Choi matrix is not Hermitian (defect " + std::to_string(defect) +
                    "); the map does not preserve Hermiticity");
  }
  return hermitian_part(c);
}

struct BallCheck {
  bool inside = false;
  double radius = 0.0;
  double distance = 0.0;
};

BallCheck state_projector_ball(const Matrix& choi, int d) {
  // omega = phi(I)/d = tr_1(C)/d; I (x) omega is the Frobenius-nearest
  // product of that shape.
  Matrix omega = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) omega += choi.block(i * d, i * d, d, d);
  omega = hermitian_part(omega / static_cast<double>(d));
  BallCheck out;
  const double lmin = herm_eig(omega).values(0);
  if (lmin <= 0.0) return out;
  out.radius = 0.5 * lmin;
  out.distance = (choi - kron(Matrix::Identity(d, d), omega)).norm();
  out.inside = out.distance < out.radius;
  return out;
}

double lambda_min_2x2(const Matrix& m) {
  const double a = m(0, 0).real();
  const double b = m(1, 1).real();
  const double off = std::abs(0.5 * (m(0, 1) + std::conj(m(1, 0))));
  return 0.5 * (a + b) - std::hypot(0.5 * (a - b), off);
}

double qubit_positivity_witness(const Superoperator& phi) {
  auto f = [&](double theta, double azimuth) {
    Vector x(2);
    x << std::cos(0.5 * theta), std::polar(std::sin(0.5 * theta), azimuth);
    const Matrix rho = x * x.adjoint();
    return lambda_min_2x2(ebflow::apply(phi, rho));
  };
  constexpr int kTheta = 33;
  constexpr int kAzimuth = 64;
  const double pi = std::numbers::pi;
  struct Candidate {
    double value, theta, azimuth;
  };
  std::vector<Candidate> grid;
  grid.reserve(kTheta * kAzimuth);
  for (int i = 0; i < kTheta; ++i) {
    const double theta = pi * i / (kTheta - 1);
    for (int j = 0; j < kAzimuth; ++j) {
      const double azimuth = 2.0 * pi * j / kAzimuth;
      grid.push_back({f(theta, azimuth), theta, azimuth});
    }
  }
  std::partial_sort(grid.begin(), grid.begin() + 4, grid.end(),
                    [](const Candidate& a, const Candidate& b) { return a.value < b.value; });
  double best = grid.front().value;
  for (int c = 0; c < 4; ++c) {
    Candidate cur = grid[c];
    double step = pi / (kTheta - 1);
    while (step > 1e-9) {
      bool improved = false;
      for (const auto& [dt, da] : std::array<std::pair<double, double>, 4>{
               {{step, 0.0}, {-step, 0.0}, {0.0, step}, {0.0, -step}}}) {
        const double v = f(cur.theta + dt, cur.azimuth + da);
        if (v < cur.value) {
          cur = {v, cur.theta + dt, cur.azimuth + da};
          improved = true;
        }
      }
      if (!improved) step *= 0.5;
    }
    best = std::min(best, cur.value);
  }
  return best;
}

double qudit_positivity_witness(const Superoperator& phi) {
  const int d = phi.dim();
  auto f = [&](const Vector& raw) {
    const Vector x = raw.normalized();
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(ebflow::apply(phi, Matrix(x * x.adjoint()))),
                                             Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
  };
  std::mt19937_64 rng(0x5eedULL);
  std::normal_distribution<double> gauss;
  constexpr int kSamples = 512;
  std::vector<std::pair<double, Vector>> starts;
  for (int s = 0; s < kSamples; ++s) {
    Vector x(d);
    for (int k = 0; k < d; ++k) x(k) = cplx(gauss(rng), gauss(rng));
    starts.emplace_back(f(x), x.normalized());
  }
  std::partial_sort(starts.begin(), starts.begin() + 4, starts.end(),
                    [](const auto& a, const auto& b) { return a.first < b.first; });
  double best = starts.front().first;
  for (int c = 0; c < 4; ++c) {
    auto [value, x] = starts[c];
    double step = 0.25;
    while (step > 1e-9) {
      bool improved = false;
      for (int k = 0; k < d; ++k) {
        for (cplx delta : {cplx(step, 0), cplx(-step, 0), cplx(0, step), cplx(0, -step)}) {
          Vector y = x;
          y(k) += delta;
          const double v = f(y);
          if (v < value) {
            value = v;
            x = y.normalized();
            improved = true;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    best = std::min(best, value);
  }
  return best;
}

}  // namespace

ChoiWitnesses choi_witnesses(const Superoperator& phi) {
  const Matrix c = checked_hermitian_choi(phi);
  const int d = phi.dim();
  return {min_eigenvalue(c), min_eigenvalue(partial_transpose_second(c, d, d))};
}

ClassificationReport classify_map(const Superoperator& phi, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidParameter, "classify_map: tol must be positive");
  const Matrix c = checked_hermitian_choi(phi);
  const int d = phi.dim();
  ClassificationReport r;
  r.tolerance_used = tol;
  r.min_eig_choi = min_eigenvalue(c);
  r.min_eig_choi_pt = min_eigenvalue(partial_transpose_second(c, d, d));
  r.is_cp = r.min_eig_choi >= -tol;
  r.is_cocp = r.min_eig_choi_pt >= -tol;
  r.is_ppt = r.is_cp && r.is_cocp;
  if (!r.is_ppt) {
    r.eb_status = EbStatus::EB_refuted;
  } else if (d == 2) {
    r.eb_status = EbStatus::EB_certified;
  } else {
    const BallCheck ball = state_projector_ball(c, d);
    r.certified_radius = ball.radius;
    r.eb_status = ball.inside ? EbStatus::EB_certified : EbStatus::EB_unknown;
  }
  return r;
}

InteriorCertificate eb_certify_interior(const Superoperator& phi, double tol) {
  const Matrix c = checked_hermitian_choi(phi);
  const int d = phi.dim();
  const double w = min_eigenvalue(c);
  const double wpt = min_eigenvalue(partial_transpose_second(c, d, d));

  InteriorCertificate cert;
  cert.on_boundary = std::min(w, wpt) >= -tol && std::min(w, wpt) <= tol;
  if (d == 2 && w > tol && wpt > tol) {
    cert.certified = true;
    cert.path = InteriorPath::strict_ppt_qubit;
  }
  const BallCheck ball = state_projector_ball(c, d);
  cert.radius = ball.radius;
  cert.distance = ball.distance;
  if (!cert.certified && ball.inside) {
    cert.certified = true;
    cert.path = InteriorPath::state_projector_ball;
  }
  return cert;
}

Superoperator projector_onto_state(const Matrix& omega) {
  if (omega.rows() != omega.cols() || omega.rows() < 1) {
    throw Error(ErrorKind::DimensionMismatch, "projector_onto_state: omega must be square");
  }
  const cplx tr = omega.trace();
  if (std::abs(tr - 1.0) > 1e-10) {
    throw Error(ErrorKind::TraceNotOne,
                "projector_onto_state: tr(omega) = " + std::to_string(tr.real()));
  }
  const int d = static_cast<int>(omega.rows());
  // P(X) = tr(X) omega  =>  Phi = vec(omega) vec(I)^dagger.
  return {d, vec(omega) * vec(Matrix::Identity(d, d)).adjoint()};
}

double positivity_witness(const Superoperator& phi) {
  return phi.dim() == 2 ? qubit_positivity_witness(phi) : qudit_positivity_witness(phi);
}

double cone_witness(const Superoperator& phi, Cone cone) {
  switch (cone) {
    case Cone::P: return positivity_witness(phi);
    case Cone::CP: return choi_witnesses(phi).choi;
    case Cone::coCP: return choi_witnesses(phi).choi_pt;
    case Cone::PPT:
    case Cone::EB: {
      const auto w = choi_witnesses(phi);
      return std::min(w.choi, w.choi_pt);
    }
  }
  return 0.0;
}

}  // namespace ebflow
