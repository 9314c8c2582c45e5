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

#include "ebflow/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include <Eigen/Eigenvalues>

#include "ebflow/errors.hpp"

namespace ebflow {

std::string_view to_string(AsymptoticClass c) {
  switch (c) {
    case AsymptoticClass::eventually_EB: return "eventually_EB";
    case AsymptoticClass::asymptotically_EB: return "asymptotically_EB";
    case AsymptoticClass::asymptotically_PPT: return "asymptotically_PPT";
    case AsymptoticClass::not_asymptotically_EB: return "not_asymptotically_EB";
    case AsymptoticClass::undetermined: return "undetermined";
  }
  return "?";
}

std::string_view to_string(PredictorBasis b) {
  switch (b) {
    case PredictorBasis::spectral_semigroup: return "spectral_semigroup";
    case PredictorBasis::spectral_commuting: return "spectral_commuting";
    case PredictorBasis::periodic_limit_cycle: return "periodic_limit_cycle";
    case PredictorBasis::decoherence_corollary: return "decoherence_corollary";
    case PredictorBasis::asymptotic_map_interior: return "asymptotic_map_interior";
    case PredictorBasis::none: return "none";
  }
  return "?";
}

std::string_view to_string(RetentionCertificate r) {
  switch (r) {
    case RetentionCertificate::analytic_monotone: return "analytic_monotone";
    case RetentionCertificate::cp_divisible_one_instant: return "cp_divisible_one_instant";
    case RetentionCertificate::asymptotic_interior: return "asymptotic_interior";
    case RetentionCertificate::sampled_grid: return "sampled_grid";
    case RetentionCertificate::none: return "none";
  }
  return "?";
}

std::string_view to_string(TauKind k) {
  switch (k) {
    case TauKind::finite: return "finite";
    case TauKind::infinite: return "infinite";
    case TauKind::undefined: return "undefined";
  }
  return "?";
}

std::string_view to_string(ArrivalStatus s) {
  switch (s) {
    case ArrivalStatus::ok: return "ok";
    case ArrivalStatus::not_reached: return "not_reached";
    case ArrivalStatus::no_retention_certificate: return "no_retention_certificate";
  }
  return "?";
}

namespace {

constexpr double kSpectralTol = 1e-9;

double scale_of(const Matrix& m) { return std::max(1.0, m.cwiseAbs().maxCoeff()); }

// lim e^{tL}: keep the kernel projection, drop decaying modes.
Superoperator spectral_limit(const Superoperator& gen) {
  const MapSpectrum sp = map_spectrum(gen);
  const double eps = kSpectralTol * scale_of(gen.matrix());
  Superoperator out = Superoperator::zero(gen.dim());
  for (Eigen::Index i = 0; i < sp.eigenvalues.size(); ++i) {
    const cplx mu = sp.eigenvalues(i);
    if (mu.real() < -eps) continue;
    if (std::abs(mu) <= eps) {
      out = out + sp.projector(static_cast<std::size_t>(i));
      continue;
    }
    std::ostringstream os;
    os << "generator eigenvalue " << mu.real() << (mu.imag() < 0 ? "" : "+") << mu.imag()
       << "i does not decay";
    throw Error(ErrorKind::NoLimit, os.str());
  }
  return out;
}

struct Kernel {
  int dim = 0;
  std::optional<Matrix> omega;
  double min_decay = 0.0;  // min -Re mu over non-kernel modes
};

Kernel kernel_of(const Superoperator& m) {
  const MapSpectrum sp = map_spectrum(m);
  const double eps = kSpectralTol * scale_of(m.matrix());
  Kernel k;
  k.min_decay = std::numeric_limits<double>::infinity();
  std::size_t idx = 0;
  for (Eigen::Index i = 0; i < sp.eigenvalues.size(); ++i) {
    const cplx mu = sp.eigenvalues(i);
    if (std::abs(mu) <= eps) {
      ++k.dim;
      idx = static_cast<std::size_t>(i);
    } else {
      k.min_decay = std::min(k.min_decay, -mu.real());
    }
  }
  if (k.dim == 1) {
    Matrix w = sp.right[idx];
    const cplx tr = w.trace();
    if (std::abs(tr) > 1e-12) k.omega = hermitian_part(Matrix(w / tr));
  }
  return k;
}

// Witness of the limit for the evaluated cone, and whether it is interior.
double limit_margin(const Superoperator& limit, Cone evaluated) {
  return path_witness(limit, evaluated);
}

}  // namespace

double path_witness(const Superoperator& phi, Cone cone) {
  if (cone == Cone::EB && phi.dim() > 2) return cone_witness(phi, Cone::PPT);
  return cone_witness(phi, cone);
}

double default_t_max(const GeneratorFamily& family) {
  const Superoperator gen =
      family.floquet() ? family.floquet()->core->evaluate(0.0) : family.evaluate(0.0);
  Eigen::ComplexEigenSolver<Matrix> es(gen.matrix(), false);
  const double eps = kSpectralTol * scale_of(gen.matrix());
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double re = std::abs(es.eigenvalues()(i).real());
    if (re > eps) gap = std::min(gap, re);
  }
  double t_max = std::isfinite(gap) ? 20.0 / gap : 20.0;
  if (auto cut = family.coherence_cutoff()) t_max = std::max(t_max, 2.0 * *cut);
  return t_max;
}

AsymptoticMap asymptotic_map(const GeneratorFamily& family) {
  AsymptoticMap out;
  if (const FloquetStructure* fl = family.floquet()) {
    const Superoperator core_limit = spectral_limit(fl->core->evaluate(0.0));
    auto drive = fl->drive;
    out.periodic = true;
    out.period = fl->period;
    out.cycle = [drive, core_limit](double t) {
      return compose(Superoperator::conjugation(drive(t)), core_limit);
    };
    out.limit = out.cycle(0.0);
    out.method = "limit cycle P_t o lim e^{tX}";
    return out;
  }
  const double horizon = 4.0 * default_t_max(family);
  if (const ClosedFormSolution* cf = family.closed_form(); cf && !cf->terms.empty()) {
    Superoperator limit = Superoperator::zero(family.dim());
    for (const SpectralTerm& term : cf->terms) {
      const cplx a = term.eigenvalue(horizon);
      const cplx b = term.eigenvalue(2.0 * horizon);
      if (!std::isfinite(std::abs(a)) || !std::isfinite(std::abs(b)) ||
          std::abs(a - b) > 1e-10 * std::max(1.0, std::abs(b))) {
        throw Error(ErrorKind::NoLimit, "closed-form eigenvalue does not settle");
      }
      if (std::abs(b) > 1e-12) limit = limit + term.projector * b;
    }
    out.limit = limit;
    out.method = "closed-form eigenvalue limits";
    return out;
  }
  if (family.traits().constant) {
    try {
      out.limit = spectral_limit(family.evaluate(0.0));
      out.method = "spectral projection of the generator";
      return out;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Defective) throw;
    }
  }
  const EvolutionHandle handle(std::make_shared<const GeneratorFamily>(family));
  const Superoperator a = handle.solve(horizon);
  const Superoperator b = handle.solve(2.0 * horizon);
  if (sup_distance(a, b) > 1e-8) {
    throw Error(ErrorKind::NoLimit, "Lambda_t has not settled by t=" + std::to_string(2 * horizon));
  }
  out.limit = b;
  out.method = "sampled Lambda_t at large t";
  return out;
}

AsymptoticVerdict predict_eventually_eb(const GeneratorFamily& family) {
  AsymptoticVerdict v;
  std::ostringstream ev;

  std::optional<AsymptoticMap> limit;
  try {
    limit = asymptotic_map(family);
  } catch (const Error& e) {
    ev << "asymptotic map unavailable (" << e.what() << "); ";
  }
  std::optional<InteriorCertificate> interior;
  if (limit) {
    v.limit_witnesses = choi_witnesses(limit->limit);
    interior = eb_certify_interior(limit->limit);
    v.limit_interior_certified = interior->certified;
  }

  auto classify_state = [&](const Matrix& omega, PredictorBasis basis, const char* what) {
    v.omega = omega;
    const double lmin = herm_eig(omega).values(0);
    ev << what << "; lambda_min(omega) = " << lmin;
    if (lmin > psd_tol) {
      v.classification = AsymptoticClass::eventually_EB;
      v.basis = basis;
      return true;
    }
    if (lmin >= -psd_tol) {
      v.classification = AsymptoticClass::asymptotically_EB;
      v.basis = basis;
      return true;
    }
    return false;
  };

  // Schur-product dynamics: EB exactly when D(t) = I, which needs a
  // non-invertible map.
  if (family.kind() == FamilyKind::pure_decoherence) {
    v.basis = PredictorBasis::decoherence_corollary;
    if (family.coherence_cutoff()) {
      v.classification = AsymptoticClass::eventually_EB;
      ev << "coherences vanish identically for t >= " << *family.coherence_cutoff();
    } else if (limit) {
      const int d = family.dim();
      double residual = 0.0;
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          if (i != j) residual = std::max(residual, std::abs(limit->limit.matrix()(i + j * d, i + j * d)));
        }
      }
      ev << "max residual coherence |D_ij(inf)| = " << residual;
      v.classification = residual <= 1e-10 ? AsymptoticClass::asymptotically_EB
                                           : AsymptoticClass::not_asymptotically_EB;
    } else {
      v.classification = AsymptoticClass::undetermined;
    }
    v.evidence = ev.str();
    return v;
  }

  try {
    if (const FloquetStructure* fl = family.floquet()) {
      const Kernel k = kernel_of(fl->core->evaluate(0.0));
      v.kernel_dim = k.dim;
      if (k.dim == 1 && k.omega && k.min_decay > 0.0 &&
          classify_state(*k.omega, PredictorBasis::periodic_limit_cycle,
                         "one-dimensional kernel of the Floquet core")) {
        v.evidence = ev.str();
        return v;
      }
    } else if (family.traits().constant) {
      const Kernel k = kernel_of(family.evaluate(0.0));
      v.kernel_dim = k.dim;
      if (k.dim == 1 && k.omega && k.min_decay > 0.0 &&
          classify_state(*k.omega, PredictorBasis::spectral_semigroup,
                         "one-dimensional kernel, all other modes decay")) {
        v.evidence = ev.str();
        return v;
      }
    } else if (family.traits().commutative) {
      // Eigenvalues of int_0^T L_s ds: one kernel mode, all others diverging.
      const double t1 = 4.0 * default_t_max(family);
      const Kernel k1 = kernel_of(family.integrated(t1));
      const Kernel k2 = kernel_of(family.integrated(2.0 * t1));
      v.kernel_dim = k2.dim;
      const bool divergent = k2.min_decay > 40.0 && k2.min_decay > 1.5 * k1.min_decay;
      if (k2.dim == 1 && k2.omega && divergent &&
          classify_state(*k2.omega, PredictorBasis::spectral_commuting,
                         "one-dimensional common kernel, integrated decay diverges")) {
        v.evidence = ev.str();
        return v;
      }
      if (!divergent) ev << "integrated decay stays bounded (" << k2.min_decay << "); ";
    }
  } catch (const Error& e) {
    ev << "spectral route failed (" << e.what() << "); ";
  }

  if (!limit) {
    v.classification = AsymptoticClass::undetermined;
    v.evidence = ev.str();
    return v;
  }
  v.basis = PredictorBasis::asymptotic_map_interior;
  const ChoiWitnesses w = *v.limit_witnesses;
  ev << "limit witnesses (" << w.choi << ", " << w.choi_pt << ")";
  if (interior->certified) {
    v.classification = AsymptoticClass::eventually_EB;
    ev << "; interior certificate " << to_string(interior->path);
  } else if (std::min(w.choi, w.choi_pt) >= -psd_tol) {
    v.classification = family.dim() == 2 ? AsymptoticClass::asymptotically_EB
                                         : AsymptoticClass::asymptotically_PPT;
    ev << "; limit on the cone boundary";
  } else {
    v.classification = AsymptoticClass::not_asymptotically_EB;
  }
  v.evidence = ev.str();
  return v;
}

// ---------------------------------------------------------------- arrival

namespace {

std::vector<double> eval_grid(const std::function<Superoperator(double)>& path, Cone cone,
                              const std::vector<double>& ts, int threads) {
  std::vector<double> ws(ts.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) ws[k] = path_witness(path(ts[k]), cone);
  };
  const std::size_t n = ts.size();
  const int nt = std::max(1, std::min<int>(threads, static_cast<int>(n / 16)));
  if (nt == 1) {
    work(0, n);
    return ws;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(nt);
  const std::size_t chunk = (n + nt - 1) / nt;
  for (int i = 0; i < nt; ++i) {
    pool.emplace_back([&, i] {
      try {
        work(i * chunk, std::min(n, (i + 1) * chunk));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return ws;
}

}  // namespace

ArrivalResult arrival_on_path(const std::function<Superoperator(double)>& path, int d, Cone cone,
                              double t_start, const ArrivalSearch& search,
                              const PathContext& context) {
  if (!search.t_max || !(*search.t_max > 0.0)) {
    throw Error(ErrorKind::InvalidParameter, "arrival_on_path: positive t_max required");
  }
  if (search.grid_n < 2) throw Error(ErrorKind::InvalidParameter, "arrival: grid_n >= 2");
  ArrivalResult r;
  r.cone = cone;
  r.evaluated_cone = (cone == Cone::EB && d > 2) ? Cone::PPT : cone;
  r.lower_bound_only = cone == Cone::EB && d > 2;
  const double tol = search.tol;

  std::optional<double> limit_w;
  if (context.limit) limit_w = limit_margin(*context.limit, r.evaluated_cone);
  const bool limit_inside = limit_w && *limit_w > tol;

  double t_max = *search.t_max;
  std::vector<double> ts, ws;
  int k_neg = -1;
  const int n = search.grid_n;
  for (int ext = 0;; ++ext) {
    ts.resize(n + 1);
    for (int k = 0; k <= n; ++k) ts[k] = t_start + t_max * k / n;
    ws = eval_grid(path, cone, ts, search.threads);
    k_neg = -1;
    for (int k = n; k >= 0; --k) {
      if (ws[k] < -tol) {
        k_neg = k;
        break;
      }
    }
    if (k_neg == n && limit_inside && ext < search.max_extensions) {
      t_max *= 2.0;
      continue;
    }
    break;
  }
  r.t_max = t_max;
  r.horizon_witness = ws[n];
  r.tolerance = search.bisect_tol.value_or(1e-10 * t_max);

  if (k_neg == n) {
    r.status = ArrivalStatus::not_reached;
    r.tau = std::numeric_limits<double>::infinity();
    r.bracket = {ts[n], std::numeric_limits<double>::infinity()};
    const bool tail_negative = context.tail_witness && *context.tail_witness < -10.0 * tol;
    const bool limit_outside = limit_w && *limit_w < -10.0 * tol;
    const bool stalled = ws[n] < -10.0 * tol && ws[n] - ws[n - 1] <= tol;
    if (tail_negative || limit_outside || stalled) {
      r.kind = TauKind::infinite;
      r.note = tail_negative   ? "analytic tail witness is negative"
               : limit_outside ? "limit lies outside the cone"
                               : "witness negative and non-increasing at the horizon";
    } else {
      r.kind = TauKind::undefined;
      r.note = "witness negative at the horizon";
    }
    return r;
  }

  if (k_neg < 0) {
    r.tau = t_start;
    r.bracket = {t_start, t_start};
  } else {
    double lo = ts[k_neg];
    double hi = ts[k_neg + 1];
    const double threshold = ws[k_neg + 1] >= 0.0 ? 0.0 : -tol;
    while (hi - lo > r.tolerance) {
      const double mid = 0.5 * (lo + hi);
      if (path_witness(path(mid), cone) < threshold) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    r.tau = hi;
    r.bracket = {lo, hi};
  }

  if (context.single_crossing) {
    r.retention = RetentionCertificate::analytic_monotone;
  } else if (context.cp_divisible) {
    r.retention = RetentionCertificate::cp_divisible_one_instant;
  } else if (limit_inside) {
    // Weyl: eigenvalues move by at most the Frobenius distance of the Choi
    // matrices (partial transposition is a Frobenius isometry).
    const Superoperator end = path(ts[n]);
    const double dist = r.evaluated_cone == Cone::P
                            ? spectral_norm(end.matrix() - context.limit->matrix())
                            : (to_choi(end).matrix - to_choi(*context.limit).matrix).norm();
    if (dist < *limit_w - tol) r.retention = RetentionCertificate::asymptotic_interior;
  }
  if (r.retention == RetentionCertificate::none && ws[n] > tol) {
    const int tail_start = n - std::max(1, n / 10);
    bool nondecreasing = true;
    for (int k = tail_start; k < n; ++k) nondecreasing = nondecreasing && ws[k + 1] >= ws[k] - tol;
    if (nondecreasing) r.retention = RetentionCertificate::sampled_grid;
  }
  if (r.retention == RetentionCertificate::none) {
    r.status = ArrivalStatus::no_retention_certificate;
    r.kind = TauKind::undefined;
    r.note = "last entry at " + std::to_string(r.tau) + " but the tail is not certified";
  } else {
    r.status = ArrivalStatus::ok;
    r.kind = TauKind::finite;
  }
  return r;
}

ArrivalResult arrival_time(const EvolutionHandle& handle, Cone cone, const ArrivalSearch& search) {
  const GeneratorFamily& fam = handle.family();
  ArrivalSearch s = search;
  if (!s.t_max) s.t_max = default_t_max(fam);
  PathContext ctx;
  const Cone evaluated = (cone == Cone::EB && fam.dim() > 2) ? Cone::PPT : cone;
  if (const ClosedFormSolution* cf = fam.closed_form()) {
    const auto& sc = cf->single_crossing_cones;
    ctx.single_crossing = std::find(sc.begin(), sc.end(), evaluated) != sc.end();
  }
  ctx.cp_divisible = fam.traits().cp_divisible;
  try {
    const AsymptoticMap am = asymptotic_map(fam);
    if (!am.periodic) ctx.limit = am.limit;
  } catch (const Error&) {
    // No limit: retention falls back to the sampled tail.
  }
  return arrival_on_path([&handle](double t) { return handle.solve(t); }, fam.dim(), cone, 0.0, s,
                         ctx);
}

// ---------------------------------------------------------------- compositions

CompositionExperiment ppt_composition_experiment(const Superoperator& phi, int n_max, double tol) {
  if (n_max < 1) throw Error(ErrorKind::InvalidParameter, "composition experiment: n_max >= 1");
  CompositionExperiment out;
  Superoperator cur = phi;
  for (int n = 1; n <= n_max; ++n) {
    const ClassificationReport rep = classify_map(cur, tol);
    out.steps.push_back({n, rep.min_eig_choi, rep.min_eig_choi_pt, rep.eb_status});
    if (!out.first_eb && rep.eb_status == EbStatus::EB_certified) out.first_eb = n;
    cur = compose(cur, phi);
  }
  return out;
}

// ---------------------------------------------------------------- lemmas

double interval_cover_threshold(double a, double b) {
  if (!(a > 0.0) || !(b > a) || !std::isfinite(b)) {
    throw Error(ErrorKind::InvalidInterval, "interval_cover_threshold: need 0 < a < b");
  }
  return std::ceil(a / (b - a)) * a;
}

double max_min_pairwise_product(const std::vector<double>& p) {
  if (p.size() < 2) throw Error(ErrorKind::NotAProbabilityVector, "need at least two entries");
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= -1e-12)) throw Error(ErrorKind::NotAProbabilityVector, "negative entry");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-10) {
    throw Error(ErrorKind::NotAProbabilityVector, "entries do not sum to one");
  }
  std::vector<double> q(p);
  std::partial_sort(q.begin(), q.begin() + 2, q.end());
  return std::max(q[0], 0.0) * std::max(q[1], 0.0);
}

}  // namespace ebflow
