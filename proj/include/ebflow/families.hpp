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

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ebflow/classify.hpp"
#include "ebflow/superop.hpp"

namespace ebflow {

/// A real rate gamma(t) with an optional exact antiderivative
/// Gamma(t) = int_0^t gamma(s) ds. Without one, Gamma is computed by
/// adaptive quadrature to absolute tolerance 1e-10.
class RateFunction {
 public:
  /// The zero rate.
  RateFunction();

  static RateFunction constant_rate(double value);
  static RateFunction from(std::function<double(double)> rate,
                           std::function<double(double)> antiderivative = {},
                           bool nonnegative_everywhere = false);

  double operator()(double t) const { return rate_(t); }
  double integral(double t) const;
  bool is_constant() const { return constant_.has_value(); }
  std::optional<double> constant_value() const { return constant_; }
  bool nonnegative_everywhere() const { return nonnegative_; }

 private:
  std::function<double(double)> rate_;
  std::function<double(double)> antiderivative_;
  std::optional<double> constant_;
  bool nonnegative_ = false;
};

/// Matrix-valued coefficient a(t) with an optional exact antiderivative.
class MatrixFunction {
 public:
  static MatrixFunction constant_matrix(Matrix value);
  static MatrixFunction from(std::function<Matrix(double)> f,
                             std::function<Matrix(double)> antiderivative = {});

  Matrix operator()(double t) const { return f_(t); }
  Matrix integral(double t) const;
  bool is_constant() const { return constant_.has_value(); }

 private:
  std::function<Matrix(double)> f_;
  std::function<Matrix(double)> antiderivative_;
  std::optional<Matrix> constant_;
};

enum class FamilyKind {
  gkls,
  pauli,
  phase_covariant,
  eternal_nm,
  depolarizing,
  detailed_balance,
  floquet,
  pure_decoherence,
  diagonally_covariant,
};

std::string_view to_string(FamilyKind kind);
FamilyKind family_kind_from_string(std::string_view name);
const std::vector<FamilyKind>& all_family_kinds();

struct FamilyTraits {
  bool constant = false;      // L_t does not depend on t (semigroup)
  bool commutative = false;   // L_t L_s = L_s L_t
  bool cp_divisible = false;  // GKLS with nonnegative rates at every t
  bool invertible = true;     // Lambda_t invertible for every finite t
};

struct SpectralTerm {
  std::function<cplx(double)> eigenvalue;
  Superoperator projector;
};

struct ClosedFormSolution {
  std::function<Superoperator(double)> map;
  /// Lambda_t = sum_i eigenvalue_i(t) projector_i with fixed projectors; empty
  /// when only `map` is known.
  std::vector<SpectralTerm> terms;
  /// omega(t) spanning the image of the asymptotic projection, if known.
  std::function<Matrix(double)> stationary_state;
  /// Cones whose Choi witness changes sign at most once along the family.
  std::vector<Cone> single_crossing_cones;
  /// lim_{t -> inf} of the witness of V_{t,s}, when known in closed form.
  std::function<std::optional<double>(double s, Cone cone)> propagator_tail_witness;
};

class GeneratorFamily;

/// Lambda_t = P_t o e^{tX} with P_t(a) = p_t a p_t^dagger periodic.
struct FloquetStructure {
  std::function<Matrix(double)> drive;  // p_t, unitary, p_0 = I
  double period = 0.0;
  std::shared_ptr<const GeneratorFamily> core;  // constant GKLS X
};

/// Time-parametrised generator t -> L_t with metadata. Immutable after
/// construction; evaluate() is pure.
class GeneratorFamily {
 public:
  struct Parts {
    FamilyKind kind = FamilyKind::gkls;
    int d = 0;
    std::function<Superoperator(double)> generator;
    FamilyTraits traits;
    /// int_0^t L_s ds, when known exactly.
    std::function<Superoperator(double)> integrated;
    std::optional<ClosedFormSolution> closed_form;
    std::optional<FloquetStructure> floquet;
    /// Pure decoherence: coherences vanish identically from this time on.
    std::optional<double> coherence_cutoff;
    std::string description;
    std::vector<std::string> diagnostics;
  };

  explicit GeneratorFamily(Parts parts);

  FamilyKind kind() const { return p_.kind; }
  int dim() const { return p_.d; }
  const FamilyTraits& traits() const { return p_.traits; }
  const ClosedFormSolution* closed_form() const {
    return p_.closed_form ? &*p_.closed_form : nullptr;
  }
  const FloquetStructure* floquet() const { return p_.floquet ? &*p_.floquet : nullptr; }
  std::optional<double> coherence_cutoff() const { return p_.coherence_cutoff; }
  const std::string& description() const { return p_.description; }
  const std::vector<std::string>& diagnostics() const { return p_.diagnostics; }

  Superoperator evaluate(double t) const { return p_.generator(t); }
  /// int_0^t L_s ds; exact when the family knows it, adaptive quadrature
  /// otherwise.
  Superoperator integrated(double t) const;

 private:
  Parts p_;
};

struct LindbladTerm {
  Matrix op;
  RateFunction rate;
};

/// L_t(rho) = -i[H, rho] + sum_k gamma_k(t) (V_k rho V_k^dagger - {V_k^dagger V_k, rho}/2).
GeneratorFamily gkls(const Matrix& hamiltonian, const std::vector<LindbladTerm>& lindblads);

/// Superoperator of a single GKLS generator with constant data.
Superoperator gkls_generator(const Matrix& hamiltonian,
                             const std::vector<std::pair<Matrix, double>>& lindblads);

/// L_t(rho) = sum_k gamma_k(t) (sigma_k rho sigma_k - rho), k = 1..3.
GeneratorFamily pauli_channel(const RateFunction& g1, const RateFunction& g2,
                              const RateFunction& g3);

/// Pauli P-divisibility on a grid: all pair sums gamma_i + gamma_j >= 0.
bool pauli_p_divisible(const RateFunction& g1, const RateFunction& g2, const RateFunction& g3,
                       const std::vector<double>& times);

/// Rank-one Pauli projector P_k(rho) = tr(sigma_k rho) sigma_k / 2, k = 1..4.
Superoperator pauli_projector(int k);

struct PhaseCovariantParams {
  double omega = 0.0;  // Hamiltonian frequency
  double gamma_plus = 0.0;
  double gamma_minus = 0.0;
  double gamma_z = 0.0;
};

/// -(i Omega/2)[sigma_z, .] + gamma_+ L_+ + gamma_- L_- + gamma_z L_z with the
/// closed-form semigroup. Rates outside the positivity domain are recorded in
/// diagnostics, not rejected.
GeneratorFamily phase_covariant(const PhaseCovariantParams& params);

/// Lowest eigenvalue of the coherence block of C_{Lambda_t} in closed form.
double phase_covariant_block_min(const PhaseCovariantParams& params, double t);

/// Stationary populations (p_+, p_-).
std::pair<double, double> phase_covariant_populations(const PhaseCovariantParams& params);

/// Qubit generator with rates (alpha/2, alpha/2, -(alpha/2) tanh t).
GeneratorFamily eternal_nm(double alpha);

/// Closed-form limit of the propagator witness, 1/2 - 2^{-alpha} e^{alpha s} cosh^{-alpha} s.
double eternal_nm_propagator_limit(double alpha, double s);

/// L(rho) = gamma (omega tr(rho) - rho). Throws InvalidState unless omega is
/// a density matrix and gamma > 0.
GeneratorFamily depolarizing(double gamma, const Matrix& omega);

/// Eigenvalues of C_{Lambda_t}^{T2} for the depolarizing semigroup, given the
/// spectrum of omega: the d values e^{-gt} + (1 - e^{-gt}) w_i followed by
/// the +/- pairs for i < j.
std::vector<double> depolarizing_pt_eigenvalues(double gamma, const std::vector<double>& w,
                                                double t);

/// PPT arrival time of the depolarizing semigroup: the minus-branch root
/// (e^{gt} - 1)^2 w_i w_j = 1 maximised over pairs,
/// tau = ln(1 + (min_{i<j} w_i w_j)^{-1/2}) / gamma. Infinite when some w_i = 0.
double depolarizing_tau_ppt(double gamma, const std::vector<double>& w);

struct BohrTerm {
  Matrix op;          // V with e^{iHt} V e^{-iHt} = e^{-iwt} V
  double frequency;   // w
};

/// Detailed-balance generator; every term contributes D_V + e^{-beta w} D_{V^dagger}.
/// Throws CovarianceViolation when [H, V] != -w V within 1e-8.
GeneratorFamily detailed_balance(const Matrix& hamiltonian, const std::vector<BohrTerm>& terms,
                                 double beta);

Matrix gibbs_state(const Matrix& hamiltonian, double beta);

/// Lambda_t = P_t o e^{tX}. `drive_derivative` gives d p_t / dt.
GeneratorFamily floquet_product(std::function<Matrix(double)> drive,
                                std::function<Matrix(double)> drive_derivative, double period,
                                std::shared_ptr<const GeneratorFamily> core);

/// Floquet family with p_t = exp(-i K t); requires P_period = id.
GeneratorFamily floquet_product(const Matrix& drive_hamiltonian, double period,
                                std::shared_ptr<const GeneratorFamily> core);

/// -i[H(t), .] + sum_ij a_ij(t) (E_ii rho E_jj - delta_ij {E_ii, rho}/2) with
/// H(t) = diag(h_i(t)). `coherence_cutoff` models a singular generator whose
/// map becomes fully dephasing (D(t) = I) from that time on.
GeneratorFamily pure_decoherence(const std::vector<RateFunction>& h, const MatrixFunction& a,
                                 std::optional<double> coherence_cutoff = std::nullopt);

/// Pure decoherence plus the classical part sum_{i != j} b_ij(t)
/// (E_ij rho E_ji - {E_jj, rho}/2). `b` has a zero diagonal.
GeneratorFamily diagonally_covariant(const std::vector<RateFunction>& h, const MatrixFunction& a,
                                     const MatrixFunction& b);

/// Checks ||L_t L_s - L_s L_t|| <= tol on all pairs of `times`.
bool commutes_on(const GeneratorFamily& family, const std::vector<double>& times,
                 double tol = 1e-9);

}  // namespace ebflow
