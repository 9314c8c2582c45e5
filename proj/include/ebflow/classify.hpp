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

#include <string_view>

#include "ebflow/superop.hpp"

namespace ebflow {

/// Cones of maps on M_d. P (positive maps) only appears in divisibility
/// scans; classification reports cover the Choi-based cones.
enum class Cone { P, CP, coCP, PPT, EB };

std::string_view to_string(Cone cone);
Cone cone_from_string(std::string_view name);

enum class EbStatus { EB_certified, EB_refuted, EB_unknown };
std::string_view to_string(EbStatus status);

struct ClassificationReport {
  bool is_cp = false;
  bool is_cocp = false;
  bool is_ppt = false;
  EbStatus eb_status = EbStatus::EB_unknown;
  double min_eig_choi = 0.0;
  double min_eig_choi_pt = 0.0;
  double tolerance_used = psd_tol;
  /// Radius used by the P_omega ball certificate when it was attempted; the
  /// radius is conservative, not tight.
  double certified_radius = 0.0;
};

/// Minimal eigenvalues of C_phi and C_phi^{T2}. The Choi matrix must be
/// Hermitian up to 10 * psd_tol (relative); its Hermitian part is analysed.
struct ChoiWitnesses {
  double choi = 0.0;
  double choi_pt = 0.0;
};
ChoiWitnesses choi_witnesses(const Superoperator& phi);

ClassificationReport classify_map(const Superoperator& phi, double tol = psd_tol);

enum class InteriorPath { none, strict_ppt_qubit, state_projector_ball };
std::string_view to_string(InteriorPath path);

/// Sufficient certificate that phi lies in the interior of the EB cone.
/// Path (a), d = 2: both Choi witnesses strictly above tol.
/// Path (b), any d: with omega = phi(I)/d, ||C_phi - I (x) omega||_F is
/// below lambda_min(omega)/2. A Frobenius ball of radius lambda_min(omega)
/// around I (x) omega is separable (rescale by I (x) omega^{-1/2} and use
/// the separable ball around the identity), so half that radius is
/// certified with margin.
struct InteriorCertificate {
  bool certified = false;
  bool on_boundary = false;  // both witnesses within tol of zero, none below
  InteriorPath path = InteriorPath::none;
  double radius = 0.0;    // lambda_min(omega)/2 for path (b)
  double distance = 0.0;  // ||C_phi - I (x) omega||_F for path (b)

  explicit operator bool() const { return certified; }
};

InteriorCertificate eb_certify_interior(const Superoperator& phi, double tol = psd_tol);

/// P_omega(a) = tr(a) omega. Throws TraceNotOne when |tr omega - 1| > 1e-10.
Superoperator projector_onto_state(const Matrix& omega);

/// min over pure states x of lambda_min(phi(|x><x|)): nonnegative iff phi is
/// positive. Exhaustive Bloch-sphere search for d = 2; for d > 2 a seeded
/// multistart search, so a nonnegative value is evidence rather than proof.
double positivity_witness(const Superoperator& phi);

/// Witness for cone membership: >= -tol means "in the cone". For EB and
/// d > 2 this is the PPT witness (a necessary condition only).
double cone_witness(const Superoperator& phi, Cone cone);

}  // namespace ebflow
