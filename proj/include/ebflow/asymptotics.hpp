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
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ebflow/classify.hpp"
#include "ebflow/evolve.hpp"
#include "ebflow/families.hpp"

namespace ebflow {

// ---------------------------------------------------------------- limits

/// Lambda_inf, or for Floquet families the limit cycle Z_t = P_t o lim e^{tX}.
struct AsymptoticMap {
  bool periodic = false;
  Superoperator limit;  // Lambda_inf; Z_0 when periodic
  std::function<Superoperator(double)> cycle;  // Z_t when periodic
  double period = 0.0;
  std::string method;

  Superoperator at(double t) const { return periodic ? cycle(t) : limit; }
};

/// Spectral limit with decaying eigenvalues zeroed. Throws NoLimit when some
/// eigenvalue neither decays nor settles (e.g. undamped oscillation).
AsymptoticMap asymptotic_map(const GeneratorFamily& family);

/// Natural horizon 20 / (smallest nonzero |Re mu|) of L_0 (of the core X for
/// Floquet families); 20 when the generator has no decaying mode. Pure
/// decoherence with a cutoff extends it past twice the cutoff.
double default_t_max(const GeneratorFamily& family);

// ---------------------------------------------------------------- predictor

enum class AsymptoticClass {
  eventually_EB,
  asymptotically_EB,
  asymptotically_PPT,
  not_asymptotically_EB,
  undetermined,
};
std::string_view to_string(AsymptoticClass c);

enum class PredictorBasis {
  spectral_semigroup,      // one-dimensional kernel of constant L, omega > 0
  spectral_commuting,      // common kernel of commuting L_t, divergent decay
  periodic_limit_cycle,    // Floquet core X with omega > 0
  decoherence_corollary,   // Schur-product dynamics, D(t) = I after t_*
  asymptotic_map_interior, // Lambda_inf itself classified
  none,
};
std::string_view to_string(PredictorBasis b);

struct AsymptoticVerdict {
  AsymptoticClass classification = AsymptoticClass::undetermined;
  PredictorBasis basis = PredictorBasis::none;
  std::optional<Matrix> omega;  // kernel state when identified
  int kernel_dim = -1;
  /// Witness pair (min eig C, min eig C^{T2}) of Lambda_inf (of Z_0 for
  /// limit cycles); a proxy for distance to EB, not a metric.
  std::optional<ChoiWitnesses> limit_witnesses;
  bool limit_interior_certified = false;
  std::string evidence;
};

AsymptoticVerdict predict_eventually_eb(const GeneratorFamily& family);

// ---------------------------------------------------------------- arrival

enum class RetentionCertificate {
  analytic_monotone,
  cp_divisible_one_instant,
  asymptotic_interior,
  sampled_grid,
  none,
};
std::string_view to_string(RetentionCertificate r);

enum class TauKind { finite, infinite, undefined };
std::string_view to_string(TauKind k);

/// ok: tau determined. not_reached: witness still negative at the horizon.
/// no_retention_certificate: a last entry was found but the tail is not
/// certified, so tau is reported undefined.
enum class ArrivalStatus { ok, not_reached, no_retention_certificate };
std::string_view to_string(ArrivalStatus s);

struct ArrivalSearch {
  std::optional<double> t_max;       // default: default_t_max(family)
  int grid_n = 2000;
  std::optional<double> bisect_tol;  // default: 1e-10 * t_max
  double tol = psd_tol;              // witness >= -tol counts as "in the cone"
  int threads = 1;
  /// Doublings of t_max allowed when the limit is interior-certified but the
  /// witness is still negative at the horizon.
  int max_extensions = 4;
};

struct ArrivalResult {
  Cone cone = Cone::PPT;            // requested
  Cone evaluated_cone = Cone::PPT;  // PPT stands in for EB when d > 2
  bool lower_bound_only = false;    // tau_PPT reported as a lower bound of tau_EB
  TauKind kind = TauKind::undefined;
  double tau = 0.0;
  std::pair<double, double> bracket{0.0, 0.0};
  double tolerance = 0.0;  // bisection tolerance
  double t_max = 0.0;      // horizon actually scanned
  RetentionCertificate retention = RetentionCertificate::none;
  ArrivalStatus status = ArrivalStatus::ok;
  double horizon_witness = 0.0;
  std::string note;
};

/// Facts about a path t -> Phi_t that license tail certificates.
struct PathContext {
  bool single_crossing = false;  // analytic: witness changes sign at most once
  bool cp_divisible = false;     // Phi_t = (CP map) o Phi_u for t >= u
  std::optional<Superoperator> limit;  // lim Phi_t when known
  /// Analytic value of lim witness, for refutation.
  std::optional<double> tail_witness;
};

/// Arrival time of Phi_t into `cone` over [t_start, t_start + t_max]: grid
/// scan for the last witness value below -tol, bisection on the bracket,
/// then the strongest applicable retention certificate.
ArrivalResult arrival_on_path(const std::function<Superoperator(double)>& path, int d, Cone cone,
                              double t_start, const ArrivalSearch& search,
                              const PathContext& context);

ArrivalResult arrival_time(const EvolutionHandle& handle, Cone cone,
                           const ArrivalSearch& search = {});

/// Witness of Phi for the cone actually evaluated (PPT for EB when d > 2).
double path_witness(const Superoperator& phi, Cone cone);

// ---------------------------------------------------------------- compositions

struct CompositionStep {
  int n = 0;
  double min_eig_choi = 0.0;
  double min_eig_choi_pt = 0.0;
  EbStatus eb_status = EbStatus::EB_unknown;
};

struct CompositionExperiment {
  std::vector<CompositionStep> steps;  // n = 1..n_max
  std::optional<int> first_eb;         // first n with phi^n EB-certified
};

CompositionExperiment ppt_composition_experiment(const Superoperator& phi, int n_max,
                                                 double tol = psd_tol);

// ---------------------------------------------------------------- lemmas

/// x_0 = ceil(a / (b - a)) * a: every x >= x_0 lies in some [n a, n b].
/// Throws InvalidInterval unless 0 < a < b.
double interval_cover_threshold(double a, double b);

/// min_{i<j} p_i p_j over a probability vector (n >= 2); maximal value n^{-2}
/// is attained only at the uniform distribution.
double max_min_pairwise_product(const std::vector<double>& p);

}  // namespace ebflow
