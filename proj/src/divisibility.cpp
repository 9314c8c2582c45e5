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

#include "ebflow/divisibility.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <map>

#include "ebflow/errors.hpp"

namespace ebflow {

std::string_view to_string(DivisibilityVerdict v) {
  switch (v) {
    case DivisibilityVerdict::eX_divisible_certified: return "eX_divisible_certified";
    case DivisibilityVerdict::refuted: return "refuted";
    case DivisibilityVerdict::undetermined: return "undetermined";
  }
  return "?";
}

std::string_view to_string(DivisibilityShortcut s) {
  switch (s) {
    case DivisibilityShortcut::semigroup: return "semigroup";
    case DivisibilityShortcut::cp_divisible_one_instant: return "cp_divisible_one_instant";
    case DivisibilityShortcut::none: return "none";
  }
  return "?";
}

std::vector<double> default_s_grid(double t_max) {
  std::vector<double> grid = {0.0};
  const double hi = 0.5 * t_max;
  const double lo = 1e-3 * hi;
  for (int k = 0; k < 15; ++k) grid.push_back(lo * std::pow(hi / lo, k / 14.0));
  return grid;
}

namespace {

void finish_entry(DeltaEntry& e, double tol) {
  if (e.arrival.status == ArrivalStatus::ok && e.arrival.kind == TauKind::finite) {
    e.delta = e.arrival.tau;
  }
  e.refutes = (e.tail_witness && *e.tail_witness < -10.0 * tol) ||
              (e.arrival.status == ArrivalStatus::not_reached &&
               e.arrival.kind == TauKind::infinite);
}

}  // namespace

DivisibilityReport scan_divisibility(const EvolutionHandle& handle, Cone cone,
                                     const DivisibilityOptions& options) {
  const GeneratorFamily& fam = handle.family();
  ArrivalSearch search = options.search;
  if (!search.t_max) search.t_max = default_t_max(fam);

  DivisibilityReport rep;
  rep.cone = cone;
  rep.s_grid = options.s_grid.empty() ? default_s_grid(*search.t_max) : options.s_grid;
  for (double s : rep.s_grid) {
    if (!(s >= 0.0)) throw Error(ErrorKind::InvalidParameter, "s_grid entries must be >= 0");
  }

  if (options.use_shortcuts && fam.traits().constant) {
    // V_{t,s} = Lambda_{t-s}: Delta(s) = s + tau.
    rep.shortcut_used = DivisibilityShortcut::semigroup;
    const ArrivalResult base = arrival_time(handle, cone, search);
    for (double s : rep.s_grid) {
      DeltaEntry e;
      e.s = s;
      e.arrival = base;
      if (base.kind == TauKind::finite) {
        e.arrival.tau = s + base.tau;
        e.arrival.bracket = {s + base.bracket.first, s + base.bracket.second};
      }
      finish_entry(e, search.tol);
      rep.entries.push_back(std::move(e));
    }
  } else {
    const bool cp_shortcut = options.use_shortcuts && fam.traits().cp_divisible;
    if (cp_shortcut) rep.shortcut_used = DivisibilityShortcut::cp_divisible_one_instant;
    std::optional<Superoperator> limit;
    try {
      const AsymptoticMap am = asymptotic_map(fam);
      if (!am.periodic) limit = am.limit;
    } catch (const Error&) {
    }
    const ClosedFormSolution* cf = fam.closed_form();
    for (double s : rep.s_grid) {
      DeltaEntry e;
      e.s = s;
      PathContext ctx;
      ctx.cp_divisible = cp_shortcut;
      std::function<Superoperator(double)> path;
      const bool structured = options.use_shortcuts && (fam.traits().constant || fam.floquet());
      if (s == 0.0 || structured) {
        path = [&handle, s](double t) { return handle.propagator(t, s); };
        if (s == 0.0 && cf) {
          const auto& sc = cf->single_crossing_cones;
          const Cone evaluated = (cone == Cone::EB && fam.dim() > 2) ? Cone::PPT : cone;
          ctx.single_crossing = std::find(sc.begin(), sc.end(), evaluated) != sc.end();
        }
      } else {
        auto inv = std::make_shared<Superoperator>(inverse(handle.solve(s), 1e12));
        path = [&handle, inv](double t) { return compose(handle.solve(t), *inv); };
      }
      if (limit && !fam.floquet()) {
        if (s == 0.0) {
          ctx.limit = limit;
        } else {
          ctx.limit = compose(*limit, inverse(handle.solve(s), 1e12));
        }
      }
      if (cf && cf->propagator_tail_witness) {
        e.tail_witness = cf->propagator_tail_witness(s, cone);
        ctx.tail_witness = e.tail_witness;
      }
      e.arrival = arrival_on_path(path, fam.dim(), cone, s, search, ctx);
      finish_entry(e, search.tol);
      rep.entries.push_back(std::move(e));
    }
  }

  bool all_certified = !rep.entries.empty();
  bool refuted = false;
  for (const DeltaEntry& e : rep.entries) {
    all_certified = all_certified && e.delta.has_value();
    refuted = refuted || e.refutes;
  }
  if (refuted) {
    rep.verdict = DivisibilityVerdict::refuted;
    for (const DeltaEntry& e : rep.entries) {
      if (e.refutes) {
        rep.note = "propagator tail outside the cone at s=" + std::to_string(e.s);
        break;
      }
    }
  } else if (all_certified) {
    rep.verdict = DivisibilityVerdict::eX_divisible_certified;
    rep.note = rep.shortcut_used == DivisibilityShortcut::none ? "certified on the s-grid"
                                                               : "certified via shortcut";
  } else {
    rep.verdict = DivisibilityVerdict::undetermined;
  }
  return rep;
}

ChainCheck check_implication_chain(const std::vector<DivisibilityReport>& reports) {
  // (stronger, weaker) pairs.
  static const std::pair<Cone, Cone> kImplies[] = {
      {Cone::EB, Cone::PPT}, {Cone::PPT, Cone::CP}, {Cone::PPT, Cone::coCP},
      {Cone::CP, Cone::P},   {Cone::EB, Cone::CP},  {Cone::EB, Cone::P},
      {Cone::PPT, Cone::P},  {Cone::coCP, Cone::P}};
  std::map<Cone, const DivisibilityReport*> by_cone;
  for (const auto& r : reports) by_cone[r.cone] = &r;
  ChainCheck out;
  for (const auto& [strong, weak] : kImplies) {
    auto a = by_cone.find(strong);
    auto b = by_cone.find(weak);
    if (a == by_cone.end() || b == by_cone.end()) continue;
    const DivisibilityReport& rs = *a->second;
    const DivisibilityReport& rw = *b->second;
    const std::string tag = "e" + std::string(to_string(strong)) + " vs e" +
                            std::string(to_string(weak));
    if (rs.verdict == DivisibilityVerdict::eX_divisible_certified &&
        rw.verdict == DivisibilityVerdict::refuted) {
      out.consistent = false;
      out.violations.push_back(tag + ": stronger certified, weaker refuted");
    }
    for (const DeltaEntry& es : rs.entries) {
      for (const DeltaEntry& ew : rw.entries) {
        if (es.s != ew.s || !es.delta || !ew.delta) continue;
        const double slack = 2.0 * (es.arrival.tolerance + ew.arrival.tolerance);
        if (*es.delta < *ew.delta - slack) {
          out.consistent = false;
          out.violations.push_back(tag + ": Delta(" + std::to_string(es.s) + ") ordering broken");
        }
      }
    }
  }
  return out;
}

}  // namespace ebflow
