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

#include "ebflow/families.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "ebflow/errors.hpp"
#include "ebflow/quadrature.hpp"

namespace ebflow {

namespace {

constexpr double kQuadTol = 1e-10;

// Times at which time-dependent coefficient preconditions are checked.
std::vector<double> validation_times() {
  std::vector<double> ts;
  for (int k = 0; k <= 40; ++k) ts.push_back(0.25 * k);
  return ts;
}

Superoperator dissipator(const Matrix& v) {
  const int d = static_cast<int>(v.rows());
  const Matrix id = Matrix::Identity(d, d);
  const Matrix vdv = v.adjoint() * v;
  return Superoperator::sandwich(v, v.adjoint()) -
         Superoperator::sandwich(vdv, id) * 0.5 - Superoperator::sandwich(id, vdv) * 0.5;
}

Superoperator hamiltonian_part(const Matrix& h) {
  const int d = static_cast<int>(h.rows());
  const Matrix id = Matrix::Identity(d, d);
  const cplx mi(0.0, -1.0);
  return (Superoperator::sandwich(h, id) - Superoperator::sandwich(id, h)) * mi;
}

void require_hamiltonian(const Matrix& h, const char* who) {
  if (h.rows() != h.cols() || h.rows() < 1) {
    throw Error(ErrorKind::DimensionMismatch, std::string(who) + ": H must be square");
  }
  if (!is_hermitian(h)) {
    throw Error(ErrorKind::NonHermitianHamiltonian,
                std::string(who) + ": Hamiltonian defect " + std::to_string(hermiticity_defect(h)));
  }
}

std::string fmt_double(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

Superoperator pauli_dissipator(int k) {
  const Matrix s = pauli::sigma(k);
  return Superoperator::conjugation(s) - Superoperator::identity(2);
}

// Spectrum of a density matrix; throws InvalidState unless it is one.
std::vector<double> density_spectrum(const Matrix& omega, const char* who) {
  if (omega.rows() != omega.cols() || omega.rows() < 2) {
    throw Error(ErrorKind::InvalidState, std::string(who) + ": omega must be square, d >= 2");
  }
  if (!is_hermitian(omega)) {
    throw Error(ErrorKind::InvalidState, std::string(who) + ": omega is not Hermitian");
  }
  if (std::abs(omega.trace() - 1.0) > 1e-10) {
    throw Error(ErrorKind::InvalidState, std::string(who) + ": tr(omega) != 1");
  }
  const RealVector w = herm_eig(omega).values;
  if (w(0) < -psd_tol) {
    throw Error(ErrorKind::InvalidState,
                std::string(who) + ": omega has negative eigenvalue " + fmt_double(w(0)));
  }
  std::vector<double> out(w.data(), w.data() + w.size());
  for (double& x : out) x = std::max(x, 0.0);
  return out;
}

void check_coefficient_matrices(const MatrixFunction& a, const MatrixFunction* b, int d) {
  for (double t : validation_times()) {
    const Matrix at = a(t);
    if (at.rows() != d || at.cols() != d) {
      throw Error(ErrorKind::DimensionMismatch, "a(t) must be d x d with d = len(h)");
    }
    if (!is_hermitian(at)) {
      throw Error(ErrorKind::InvalidRateMatrix, "a(" + fmt_double(t) + ") is not Hermitian");
    }
    if (min_eigenvalue(at) < -1e-10 * std::max(1.0, norm_inf(at))) {
      throw Error(ErrorKind::InvalidRateMatrix,
                  "a(" + fmt_double(t) + ") is not positive semidefinite");
    }
    if (b == nullptr) continue;
    const Matrix bt = (*b)(t);
    if (bt.rows() != d || bt.cols() != d) {
      throw Error(ErrorKind::DimensionMismatch, "b(t) must be d x d");
    }
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        const cplx v = bt(i, j);
        if (std::abs(v.imag()) > 1e-12 || v.real() < -1e-12 || (i == j && std::abs(v) > 1e-12)) {
          throw Error(ErrorKind::InvalidRateMatrix,
                      "b(" + fmt_double(t) + ") must be real, nonnegative, zero diagonal");
        }
      }
    }
  }
}

Superoperator decoherence_generator(const std::vector<double>& h, const Matrix& a) {
  const int d = static_cast<int>(h.size());
  Matrix m = Matrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      m(i + j * d, i + j * d) =
          cplx(0.0, -(h[i] - h[j])) + a(i, j) - 0.5 * (a(i, i) + a(j, j));
    }
  }
  return {d, m};
}

Superoperator classical_generator(const Matrix& b) {
  const int d = static_cast<int>(b.rows());
  Superoperator out = Superoperator::zero(d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (i == j || b(i, j) == cplx(0.0)) continue;
      out = out + dissipator(matrix_unit(d, i, j)) * b(i, j).real();
    }
  }
  return out;
}

std::vector<double> eval_all(const std::vector<RateFunction>& fs, double t) {
  std::vector<double> out;
  out.reserve(fs.size());
  for (const auto& f : fs) out.push_back(f(t));
  return out;
}

std::vector<double> integrate_all(const std::vector<RateFunction>& fs, double t) {
  std::vector<double> out;
  out.reserve(fs.size());
  for (const auto& f : fs) out.push_back(f.integral(t));
  return out;
}

bool all_constant(const std::vector<RateFunction>& fs) {
  return std::all_of(fs.begin(), fs.end(), [](const RateFunction& f) { return f.is_constant(); });
}

}  // namespace

// ---------------------------------------------------------------- rates

RateFunction::RateFunction()
    : rate_([](double) { return 0.0; }),
      antiderivative_([](double) { return 0.0; }),
      constant_(0.0),
      nonnegative_(true) {}

RateFunction RateFunction::constant_rate(double value) {
  RateFunction r;
  r.rate_ = [value](double) { return value; };
  r.antiderivative_ = [value](double t) { return value * t; };
  r.constant_ = value;
  r.nonnegative_ = value >= 0.0;
  return r;
}

RateFunction RateFunction::from(std::function<double(double)> rate,
                                std::function<double(double)> antiderivative,
                                bool nonnegative_everywhere) {
  if (!rate) throw Error(ErrorKind::InvalidParameter, "RateFunction: empty callable");
  RateFunction r;
  r.rate_ = std::move(rate);
  r.antiderivative_ = std::move(antiderivative);
  r.constant_.reset();
  r.nonnegative_ = nonnegative_everywhere;
  return r;
}

double RateFunction::integral(double t) const {
  if (constant_) return *constant_ * t;
  if (antiderivative_) return antiderivative_(t) - antiderivative_(0.0);
  return quadrature::integrate<double>(rate_, 0.0, t, kQuadTol);
}

MatrixFunction MatrixFunction::constant_matrix(Matrix value) {
  MatrixFunction m;
  m.f_ = [value](double) { return value; };
  m.antiderivative_ = [value](double t) { return Matrix(value * t); };
  m.constant_ = std::move(value);
  return m;
}

MatrixFunction MatrixFunction::from(std::function<Matrix(double)> f,
                                    std::function<Matrix(double)> antiderivative) {
  if (!f) throw Error(ErrorKind::InvalidParameter, "MatrixFunction: empty callable");
  MatrixFunction m;
  m.f_ = std::move(f);
  m.antiderivative_ = std::move(antiderivative);
  return m;
}

Matrix MatrixFunction::integral(double t) const {
  if (antiderivative_) return antiderivative_(t) - antiderivative_(0.0);
  return quadrature::integrate<Matrix>(f_, 0.0, t, kQuadTol);
}

// ---------------------------------------------------------------- kinds

std::string_view to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::gkls: return "gkls";
    case FamilyKind::pauli: return "pauli";
    case FamilyKind::phase_covariant: return "phase_covariant";
    case FamilyKind::eternal_nm: return "eternal_nm";
    case FamilyKind::depolarizing: return "depolarizing";
    case FamilyKind::detailed_balance: return "detailed_balance";
    case FamilyKind::floquet: return "floquet";
    case FamilyKind::pure_decoherence: return "pure_decoherence";
    case FamilyKind::diagonally_covariant: return "diagonally_covariant";
  }
  return "?";
}

const std::vector<FamilyKind>& all_family_kinds() {
  static const std::vector<FamilyKind> kinds = {
      FamilyKind::gkls,           FamilyKind::pauli,
      FamilyKind::phase_covariant, FamilyKind::eternal_nm,
      FamilyKind::depolarizing,   FamilyKind::detailed_balance,
      FamilyKind::floquet,        FamilyKind::pure_decoherence,
      FamilyKind::diagonally_covariant};
  return kinds;
}

FamilyKind family_kind_from_string(std::string_view name) {
  for (FamilyKind k : all_family_kinds()) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorKind::InvalidParameter, "unknown family kind '" + std::string(name) + "'");
}

// ---------------------------------------------------------------- family

GeneratorFamily::GeneratorFamily(Parts parts) : p_(std::move(parts)) {
  if (p_.d < 1 || !p_.generator) {
    throw Error(ErrorKind::InvalidParameter, "GeneratorFamily: missing dimension or generator");
  }
}

Superoperator GeneratorFamily::integrated(double t) const {
  if (p_.integrated) return p_.integrated(t);
  if (p_.traits.constant) return evaluate(0.0) * t;
  const Matrix m = quadrature::integrate<Matrix>(
      [this](double s) { return Matrix(evaluate(s).matrix()); }, 0.0, t, kQuadTol);
  return {p_.d, m};
}

// ---------------------------------------------------------------- GKLS

Superoperator gkls_generator(const Matrix& hamiltonian,
                             const std::vector<std::pair<Matrix, double>>& lindblads) {
  require_hamiltonian(hamiltonian, "gkls");
  Superoperator out = hamiltonian_part(hamiltonian);
  for (const auto& [v, rate] : lindblads) {
    if (v.rows() != hamiltonian.rows() || v.cols() != hamiltonian.cols()) {
      throw Error(ErrorKind::DimensionMismatch, "gkls: Lindblad operator size differs from H");
    }
    out = out + dissipator(v) * rate;
  }
  return out;
}

GeneratorFamily gkls(const Matrix& hamiltonian, const std::vector<LindbladTerm>& lindblads) {
  require_hamiltonian(hamiltonian, "gkls");
  const int d = static_cast<int>(hamiltonian.rows());
  const Superoperator h_part = hamiltonian_part(hamiltonian);
  std::vector<Superoperator> parts;
  std::vector<RateFunction> rates;
  bool constant = true;
  bool nonnegative = true;
  for (const auto& term : lindblads) {
    if (term.op.rows() != d || term.op.cols() != d) {
      throw Error(ErrorKind::DimensionMismatch, "gkls: Lindblad operator size differs from H");
    }
    parts.push_back(dissipator(term.op));
    rates.push_back(term.rate);
    constant = constant && term.rate.is_constant();
    nonnegative = nonnegative && term.rate.nonnegative_everywhere();
  }

  GeneratorFamily::Parts p;
  p.kind = FamilyKind::gkls;
  p.d = d;
  p.generator = [h_part, parts, rates](double t) {
    Superoperator out = h_part;
    for (std::size_t k = 0; k < parts.size(); ++k) out = out + parts[k] * rates[k](t);
    return out;
  };
  p.integrated = [h_part, parts, rates](double t) {
    Superoperator out = h_part * t;
    for (std::size_t k = 0; k < parts.size(); ++k) out = out + parts[k] * rates[k].integral(t);
    return out;
  };
  p.traits.constant = constant;
  p.traits.commutative = constant;
  p.traits.cp_divisible = nonnegative;
  p.description = "GKLS generator, d=" + std::to_string(d) + ", " +
                  std::to_string(lindblads.size()) + " jump operator(s)";
  return GeneratorFamily(std::move(p));
}

// ---------------------------------------------------------------- Pauli

Superoperator pauli_projector(int k) {
  if (k < 1 || k > 4) throw Error(ErrorKind::InvalidParameter, "pauli_projector: k in 1..4");
  const Vector s = vec(pauli::sigma(k));
  return {2, 0.5 * s * s.adjoint()};
}

GeneratorFamily pauli_channel(const RateFunction& g1, const RateFunction& g2,
                              const RateFunction& g3) {
  const std::vector<RateFunction> g = {g1, g2, g3};
  const std::vector<Superoperator> diss = {pauli_dissipator(1), pauli_dissipator(2),
                                           pauli_dissipator(3)};

  GeneratorFamily::Parts p;
  p.kind = FamilyKind::pauli;
  p.d = 2;
  p.generator = [g, diss](double t) {
    return diss[0] * g[0](t) + diss[1] * g[1](t) + diss[2] * g[2](t);
  };
  p.integrated = [g, diss](double t) {
    return diss[0] * g[0].integral(t) + diss[1] * g[1].integral(t) + diss[2] * g[2].integral(t);
  };
  p.traits.constant = all_constant(g);
  p.traits.commutative = true;
  p.traits.cp_divisible = std::all_of(g.begin(), g.end(), [](const RateFunction& r) {
    return r.nonnegative_everywhere();
  });

  ClosedFormSolution cf;
  // lambda_k = exp(-2 (Gamma_i + Gamma_j)), {i, j, k} = {1, 2, 3}.
  auto eig = [g](int k) {
    return [g, k](double t) -> cplx {
      double s = 0.0;
      for (int j = 0; j < 3; ++j) {
        if (j != k) s += g[j].integral(t);
      }
      return std::exp(-2.0 * s);
    };
  };
  for (int k = 0; k < 3; ++k) cf.terms.push_back({eig(k), pauli_projector(k + 1)});
  cf.terms.push_back({[](double) { return cplx(1.0); }, pauli_projector(4)});
  const auto terms = cf.terms;
  cf.map = [terms](double t) {
    Superoperator out = Superoperator::zero(2);
    for (const auto& term : terms) out = out + term.projector * term.eigenvalue(t);
    return out;
  };
  cf.stationary_state = [](double) { return Matrix(0.5 * Matrix::Identity(2, 2)); };
  p.closed_form = std::move(cf);
  p.description = "Pauli channel";
  return GeneratorFamily(std::move(p));
}

bool pauli_p_divisible(const RateFunction& g1, const RateFunction& g2, const RateFunction& g3,
                       const std::vector<double>& times) {
  for (double t : times) {
    const double a = g1(t), b = g2(t), c = g3(t);
    if (a + b < -psd_tol || b + c < -psd_tol || a + c < -psd_tol) return false;
  }
  return true;
}

// ---------------------------------------------------------------- phase covariant

std::pair<double, double> phase_covariant_populations(const PhaseCovariantParams& q) {
  const double gl = q.gamma_plus + q.gamma_minus;
  if (gl == 0.0) return {0.5, 0.5};
  return {q.gamma_plus / gl, q.gamma_minus / gl};
}

double phase_covariant_block_min(const PhaseCovariantParams& q, double t) {
  const auto [pp, pm] = phase_covariant_populations(q);
  const double gl = q.gamma_plus + q.gamma_minus;
  const double e = std::exp(-gl * t);
  const double diff = (pp - pm) * (1.0 - e);
  return 0.5 * (1.0 + e - std::sqrt(diff * diff + 4.0 * std::exp(-(gl + 4.0 * q.gamma_z) * t)));
}

GeneratorFamily phase_covariant(const PhaseCovariantParams& q) {
  const Matrix h = 0.5 * q.omega * pauli::sigma(3);
  const Superoperator gen =
      gkls_generator(h, {{pauli::sigma_plus(), q.gamma_plus},
                         {pauli::sigma_minus(), q.gamma_minus},
                         {pauli::sigma(3), q.gamma_z}});
  // gamma_z L_z uses sigma_3 rho sigma_3 - rho, i.e. the dissipator of sigma_3.

  GeneratorFamily::Parts p;
  p.kind = FamilyKind::phase_covariant;
  p.d = 2;
  p.generator = [gen](double) { return gen; };
  p.integrated = [gen](double t) { return gen * t; };
  p.traits.constant = true;
  p.traits.commutative = true;
  p.traits.cp_divisible = q.gamma_plus >= 0.0 && q.gamma_minus >= 0.0 && q.gamma_z >= 0.0;

  if (q.gamma_plus < 0.0 || q.gamma_minus < 0.0) {
    p.diagnostics.push_back("gamma_+ or gamma_- negative: outside the positivity domain");
  } else if (q.gamma_z + 0.5 * std::sqrt(q.gamma_plus * q.gamma_minus) < 0.0) {
    p.diagnostics.push_back(
        "gamma_z + sqrt(gamma_+ gamma_-)/2 < 0: semigroup is not positive");
  }

  const auto [pp, pm] = phase_covariant_populations(q);
  const double gl = q.gamma_plus + q.gamma_minus;
  const double gt = 0.5 * gl + 2.0 * q.gamma_z;
  const double om = q.omega;
  ClosedFormSolution cf;
  cf.map = [pp, pm, gl, gt, om](double t) {
    const double e = std::exp(-gl * t);
    // Columns are images of E_00, E_10, E_01, E_11 (column stacking).
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = pp + pm * e;
    m(3, 0) = pm * (1.0 - e);
    m(0, 3) = pp * (1.0 - e);
    m(3, 3) = pm + pp * e;
    m(2, 2) = std::exp(cplx(-gt, -om) * t);  // rho_01
    m(1, 1) = std::exp(cplx(-gt, om) * t);   // rho_10
    return Superoperator(2, m);
  };
  cf.stationary_state = [pp, pm](double) {
    Matrix w = Matrix::Zero(2, 2);
    w(0, 0) = pp;
    w(1, 1) = pm;
    return w;
  };
  p.closed_form = std::move(cf);
  p.description = "phase-covariant qubit, Omega=" + fmt_double(q.omega) +
                  " gamma+=" + fmt_double(q.gamma_plus) + " gamma-=" + fmt_double(q.gamma_minus) +
                  " gammaz=" + fmt_double(q.gamma_z);
  return GeneratorFamily(std::move(p));
}

// ---------------------------------------------------------------- eternal NM

double eternal_nm_propagator_limit(double alpha, double s) {
  return 0.5 - std::pow(2.0, -alpha) * std::exp(alpha * s) * std::pow(std::cosh(s), -alpha);
}

GeneratorFamily eternal_nm(double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::InvalidParameter, "eternal_nm: alpha must be > 0");
  const RateFunction half = RateFunction::constant_rate(0.5 * alpha);
  const RateFunction g3 = RateFunction::from(
      [alpha](double t) { return -0.5 * alpha * std::tanh(t); },
      [alpha](double t) { return -0.5 * alpha * std::log(std::cosh(t)); });
  GeneratorFamily base = pauli_channel(half, half, g3);

  GeneratorFamily::Parts p;
  p.kind = FamilyKind::eternal_nm;
  p.d = 2;
  p.generator = [base](double t) { return base.evaluate(t); };
  p.integrated = [base](double t) { return base.integrated(t); };
  p.traits = base.traits();
  p.traits.cp_divisible = false;
  ClosedFormSolution cf = *base.closed_form();
  cf.propagator_tail_witness = [alpha](double s, Cone cone) -> std::optional<double> {
    const double x = 0.5 - eternal_nm_propagator_limit(alpha, s);  // lambda_2 ratio at t = inf
    switch (cone) {
      case Cone::P: return 0.5 * (1.0 - std::max(x, 0.0));
      case Cone::CP:
      case Cone::coCP:
      case Cone::PPT:
      case Cone::EB: return 0.5 - x;
    }
    return std::nullopt;
  };
  p.closed_form = std::move(cf);
  p.description = "eternally non-Markovian qubit, alpha=" + fmt_double(alpha);
  return GeneratorFamily(std::move(p));
}

// ---------------------------------------------------------------- depolarizing

std::vector<double> depolarizing_pt_eigenvalues(double gamma, const std::vector<double>& w,
                                                double t) {
  const double e = std::exp(-gamma * t);
  const std::size_t d = w.size();
  std::vector<double> out;
  for (std::size_t i = 0; i < d; ++i) out.push_back(e + (1.0 - e) * w[i]);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      const double mean = 0.5 * (1.0 - e) * (w[i] + w[j]);
      const double half_diff = 0.5 * (1.0 - e) * (w[i] - w[j]);
      const double r = std::sqrt(half_diff * half_diff + e * e);
      out.push_back(mean + r);
      out.push_back(mean - r);
    }
  }
  return out;
}

double depolarizing_tau_ppt(double gamma, const std::vector<double>& w) {
  if (!(gamma > 0.0)) throw Error(ErrorKind::InvalidParameter, "gamma must be > 0");
  double min_prod = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t j = i + 1; j < w.size(); ++j) min_prod = std::min(min_prod, w[i] * w[j]);
  }
  if (!(min_prod > 0.0)) return std::numeric_limits<double>::infinity();
  return std::log1p(1.0 / std::sqrt(min_prod)) / gamma;
}

GeneratorFamily depolarizing(double gamma, const Matrix& omega) {
  if (!(gamma > 0.0)) throw Error(ErrorKind::InvalidState, "depolarizing: gamma must be > 0");
  density_spectrum(omega, "depolarizing");
  const int d = static_cast<int>(omega.rows());
  const Superoperator pw = projector_onto_state(omega);
  const Superoperator id = Superoperator::identity(d);
  const Superoperator gen = (pw - id) * gamma;

  GeneratorFamily::Parts p;
  p.kind = FamilyKind::depolarizing;
  p.d = d;
  p.generator = [gen](double) { return gen; };
  p.integrated = [gen](double t) { return gen * t; };
  p.traits.constant = true;
  p.traits.commutative = true;
  p.traits.cp_divisible = true;

  ClosedFormSolution cf;
  cf.terms.push_back({[](double) { return cplx(1.0); }, pw});
  cf.terms.push_back({[gamma](double t) { return cplx(std::exp(-gamma * t)); }, id - pw});
  cf.map = [pw, id, gamma](double t) {
    const double e = std::exp(-gamma * t);
    return id * e + pw * (1.0 - e);
  };
  cf.stationary_state = [omega](double) { return omega; };
  // Every Choi(-PT) eigenvalue is monotone with at most one sign change.
  cf.single_crossing_cones = {Cone::CP, Cone::coCP, Cone::PPT};
  if (d == 2) cf.single_crossing_cones.push_back(Cone::EB);
  p.closed_form = std::move(cf);
  p.description = "generalized depolarizing, d=" + std::to_string(d) + " gamma=" +
                  fmt_double(gamma);
  return GeneratorFamily(std::move(p));
}

// ---------------------------------------------------------------- detailed balance

Matrix gibbs_state(const Matrix& hamiltonian, double beta) {
  require_hamiltonian(hamiltonian, "gibbs_state");
  const HermEig es = herm_eig(hamiltonian);
  const double e0 = es.values(0);
  RealVector weights(es.values.size());
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    weights(i) = std::exp(-beta * (es.values(i) - e0));
  }
  weights /= weights.sum();
  return es.vectors * weights.cast<cplx>().asDiagonal() * es.vectors.adjoint();
}

GeneratorFamily detailed_balance(const Matrix& hamiltonian, const std::vector<BohrTerm>& terms,
                                 double beta) {
  require_hamiltonian(hamiltonian, "detailed_balance");
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorKind::InvalidParameter, "detailed_balance: beta must be finite and >= 0");
  }
  const int d = static_cast<int>(hamiltonian.rows());
  std::vector<std::pair<Matrix, double>> lindblads;
  for (const auto& term : terms) {
    if (term.op.rows() != d || term.op.cols() != d) {
      throw Error(ErrorKind::DimensionMismatch, "detailed_balance: jump operator size");
    }
    // e^{iHt} V e^{-iHt} = e^{-iwt} V  <=>  [H, V] = -w V.
    const Matrix defect = hamiltonian * term.op - term.op * hamiltonian + term.frequency * term.op;
    if (defect.cwiseAbs().maxCoeff() > 1e-8) {
      throw Error(ErrorKind::CovarianceViolation,
                  "detailed_balance: operator is not a Bohr component at w=" +
                      fmt_double(term.frequency));
    }
    lindblads.emplace_back(term.op, 1.0);
    lindblads.emplace_back(term.op.adjoint(), std::exp(-beta * term.frequency));
  }
  const Superoperator gen = gkls_generator(hamiltonian, lindblads);

  GeneratorFamily::Parts p;
  p.kind = FamilyKind::detailed_balance;
  p.d = d;
  p.generator = [gen](double) { return gen; };
  p.integrated = [gen](double t) { return gen * t; };
  p.traits.constant = true;
  p.traits.commutative = true;
  p.traits.cp_divisible = true;
  p.description = "detailed balance, d=" + std::to_string(d) + " beta=" + fmt_double(beta);
  return GeneratorFamily(std::move(p));
}

// ---------------------------------------------------------------- Floquet

GeneratorFamily floquet_product(std::function<Matrix(double)> drive,
                                std::function<Matrix(double)> drive_derivative, double period,
                                std::shared_ptr<const GeneratorFamily> core) {
  if (!core || !core->traits().constant) {
    throw Error(ErrorKind::InvalidParameter, "floquet_product: core must be a constant generator");
  }
  if (!(period > 0.0)) throw Error(ErrorKind::InvalidParameter, "floquet_product: period <= 0");
  const int d = core->dim();
  const Matrix id = Matrix::Identity(d, d);
  for (double t : {0.0, 0.37 * period, period}) {
    const Matrix pt = drive(t);
    if (pt.rows() != d || (pt * pt.adjoint() - id).cwiseAbs().maxCoeff() > 1e-9) {
      throw Error(ErrorKind::InvalidParameter, "floquet_product: p_t is not a d x d unitary");
    }
  }
  if ((drive(0.0) - id).cwiseAbs().maxCoeff() > 1e-9) {
    throw Error(ErrorKind::InvalidParameter, "floquet_product: p_0 must be the identity");
  }
  const Superoperator pT = Superoperator::conjugation(drive(period));
  if ((pT.matrix() - Superoperator::identity(d).matrix()).cwiseAbs().maxCoeff() > 1e-9) {
    throw Error(ErrorKind::InvalidParameter, "floquet_product: P_T is not the identity map");
  }
  const Superoperator x = core->evaluate(0.0);

  GeneratorFamily::Parts p;
  p.kind = FamilyKind::floquet;
  p.d = d;
  p.generator = [drive, drive_derivative, x, id](double t) {
    const Matrix pt = drive(t);
    const Matrix h = cplx(0.0, 1.0) * drive_derivative(t) * pt.adjoint();
    const Matrix hh = 0.5 * (h + h.adjoint());
    const cplx mi(0.0, -1.0);
    const Superoperator ham =
        (Superoperator::sandwich(hh, id) - Superoperator::sandwich(id, hh)) * mi;
    const Superoperator conj = Superoperator::conjugation(pt);
    const Superoperator conj_inv = Superoperator::conjugation(pt.adjoint());
    return ham + compose(conj, compose(x, conj_inv));
  };
  p.traits.constant = false;
  p.traits.commutative = false;
  p.traits.cp_divisible = core->traits().cp_divisible;

  ClosedFormSolution cf;
  cf.map = [drive, x](double t) {
    return compose(Superoperator::conjugation(drive(t)), Superoperator(x.dim(), expm(x.matrix() * t)));
  };
  // Limit-cycle state P_t(omega), omega spanning ker X (if one-dimensional).
  try {
    const MapSpectrum sp = map_spectrum(x);
    std::vector<std::size_t> kernel;
    for (Eigen::Index i = 0; i < sp.eigenvalues.size(); ++i) {
      if (std::abs(sp.eigenvalues(i)) < 1e-9 * std::max(1.0, x.matrix().norm())) {
        kernel.push_back(static_cast<std::size_t>(i));
      }
    }
    if (kernel.size() == 1) {
      Matrix omega = sp.right[kernel[0]];
      omega /= omega.trace();
      omega = hermitian_part(omega);
      cf.stationary_state = [drive, omega](double t) {
        const Matrix pt = drive(t);
        return Matrix(pt * omega * pt.adjoint());
      };
    }
  } catch (const Error&) {
    // Defective core: no limit-cycle state recorded.
  }
  p.closed_form = std::move(cf);
  p.floquet = FloquetStructure{drive, period, core};
  p.description = "Floquet product, period=" + fmt_double(period) + ", core: " + core->description();
  return GeneratorFamily(std::move(p));
}

GeneratorFamily floquet_product(const Matrix& drive_hamiltonian, double period,
                                std::shared_ptr<const GeneratorFamily> core) {
  require_hamiltonian(drive_hamiltonian, "floquet_product");
  const Matrix k = drive_hamiltonian;
  const HermEig es = herm_eig(k);
  auto drive = [es](double t) {
    Vector phases(es.values.size());
    for (Eigen::Index i = 0; i < phases.size(); ++i) {
      phases(i) = std::exp(cplx(0.0, -es.values(i) * t));
    }
    return Matrix(es.vectors * phases.asDiagonal() * es.vectors.adjoint());
  };
  auto derivative = [drive, k](double t) { return Matrix(cplx(0.0, -1.0) * k * drive(t)); };
  return floquet_product(drive, derivative, period, std::move(core));
}

// ---------------------------------------------------------------- Schur-product families

GeneratorFamily pure_decoherence(const std::vector<RateFunction>& h, const MatrixFunction& a,
                                 std::optional<double> coherence_cutoff) {
  const int d = static_cast<int>(h.size());
  if (d < 2) throw Error(ErrorKind::DimensionMismatch, "pure_decoherence: d >= 2 required");
  check_coefficient_matrices(a, nullptr, d);
  if (coherence_cutoff && !(*coherence_cutoff >= 0.0)) {
    throw Error(ErrorKind::InvalidParameter, "pure_decoherence: cutoff must be >= 0");
  }

  GeneratorFamily::Parts p;
  p.kind = FamilyKind::pure_decoherence;
  p.d = d;
  p.generator = [h, a](double t) { return decoherence_generator(eval_all(h, t), a(t)); };
  p.integrated = [h, a](double t) { return decoherence_generator(integrate_all(h, t), a.integral(t)); };
  p.traits.constant = all_constant(h) && a.is_constant();
  p.traits.commutative = true;
  p.traits.cp_divisible = true;
  p.traits.invertible = !coherence_cutoff.has_value();
  p.coherence_cutoff = coherence_cutoff;

  ClosedFormSolution cf;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const Vector e = vec(matrix_unit(d, i, j));
      auto eigenvalue = [h, a, i, j, coherence_cutoff](double t) -> cplx {
        if (i != j && coherence_cutoff && t >= *coherence_cutoff) return 0.0;
        if (i == j) return 1.0;
        const Matrix ai = a.integral(t);
        const cplx expo = cplx(0.0, -(h[i].integral(t) - h[j].integral(t))) + ai(i, j) -
                          0.5 * (ai(i, i) + ai(j, j));
        return std::exp(expo);
      };
      cf.terms.push_back({eigenvalue, Superoperator(d, e * e.adjoint())});
    }
  }
  cf.map = [h, a, d, coherence_cutoff](double t) {
    if (coherence_cutoff && t >= *coherence_cutoff) {
      Matrix m = Matrix::Zero(d * d, d * d);
      for (int i = 0; i < d; ++i) m(i + i * d, i + i * d) = 1.0;
      return Superoperator(d, m);
    }
    const Superoperator integral = decoherence_generator(integrate_all(h, t), a.integral(t));
    Matrix m = Matrix::Zero(d * d, d * d);
    for (int k = 0; k < d * d; ++k) m(k, k) = std::exp(integral.matrix()(k, k));
    return Superoperator(d, m);
  };
  p.closed_form = std::move(cf);
  p.description = "pure decoherence, d=" + std::to_string(d) +
                  (coherence_cutoff ? ", coherences vanish at t*=" + fmt_double(*coherence_cutoff)
                                    : std::string());
  return GeneratorFamily(std::move(p));
}

GeneratorFamily diagonally_covariant(const std::vector<RateFunction>& h, const MatrixFunction& a,
                                     const MatrixFunction& b) {
  const int d = static_cast<int>(h.size());
  if (d < 2) throw Error(ErrorKind::DimensionMismatch, "diagonally_covariant: d >= 2 required");
  check_coefficient_matrices(a, &b, d);
  const bool constant = all_constant(h) && a.is_constant() && b.is_constant();

  GeneratorFamily::Parts p;
  p.kind = FamilyKind::diagonally_covariant;
  p.d = d;
  p.generator = [h, a, b](double t) {
    return decoherence_generator(eval_all(h, t), a(t)) + classical_generator(b(t));
  };
  p.integrated = [h, a, b](double t) {
    return decoherence_generator(integrate_all(h, t), a.integral(t)) +
           classical_generator(b.integral(t));
  };
  p.traits.constant = constant;
  p.traits.commutative = constant;
  p.traits.cp_divisible = true;
  p.description = "diagonally covariant, d=" + std::to_string(d);
  return GeneratorFamily(std::move(p));
}

bool commutes_on(const GeneratorFamily& family, const std::vector<double>& times, double tol) {
  std::vector<Matrix> ls;
  ls.reserve(times.size());
  for (double t : times) ls.push_back(family.evaluate(t).matrix());
  for (std::size_t i = 0; i < ls.size(); ++i) {
    for (std::size_t j = i + 1; j < ls.size(); ++j) {
      const Matrix c = ls[i] * ls[j] - ls[j] * ls[i];
      if (c.cwiseAbs().maxCoeff() > tol) return false;
    }
  }
  return true;
}

}  // namespace ebflow
