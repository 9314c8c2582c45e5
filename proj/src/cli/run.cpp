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

#include "ebflow/cli/run.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "ebflow/errors.hpp"
#include "report_util.hpp"

namespace ebflow::cli {

using detail::json;
using detail::num;

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

json family_json(const GeneratorFamily& fam) {
  json j;
  j["kind"] = std::string(to_string(fam.kind()));
  j["d"] = fam.dim();
  j["description"] = fam.description();
  j["traits"] = {{"constant", fam.traits().constant},
                 {"commutative", fam.traits().commutative},
                 {"cp_divisible", fam.traits().cp_divisible},
                 {"invertible", fam.traits().invertible},
                 {"closed_form", fam.closed_form() != nullptr}};
  j["diagnostics"] = fam.diagnostics();
  return j;
}

json parameters_json(const RawConfig& raw) {
  json j = json::object();
  for (const Section& s : raw.sections) {
    json sec = json::object();
    for (const auto& [k, e] : s.entries) sec[k] = e.value;
    j[s.name] = sec;
  }
  return j;
}

json verdict_json(const AsymptoticVerdict& v) {
  json j;
  j["classification"] = std::string(to_string(v.classification));
  j["predictor_basis"] = std::string(to_string(v.basis));
  j["kernel_dim"] = v.kernel_dim;
  if (v.omega) {
    const RealVector w = herm_eig(*v.omega).values;
    j["omega_spectrum"] = std::vector<double>(w.data(), w.data() + w.size());
  }
  if (v.limit_witnesses) {
    j["limit_witnesses"] = {{"min_eig_choi", v.limit_witnesses->choi},
                            {"min_eig_choi_pt", v.limit_witnesses->choi_pt},
                            {"proxy", "eigenvalue witness pair, not a metric distance"}};
  }
  j["limit_interior_certified"] = v.limit_interior_certified;
  j["evidence"] = v.evidence;
  return j;
}

json arrival_json(const ArrivalResult& r) {
  json j;
  j["value"] = num(r.tau);
  j["kind"] = std::string(to_string(r.kind));
  j["status"] = std::string(to_string(r.status));
  j["evaluated_cone"] = std::string(to_string(r.evaluated_cone));
  j["lower_bound_only"] = r.lower_bound_only;
  j["bracket"] = {num(r.bracket.first), num(r.bracket.second)};
  j["bisect_tol"] = r.tolerance;
  j["t_max"] = r.t_max;
  j["retention"] = std::string(to_string(r.retention));
  j["horizon_witness"] = r.horizon_witness;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

std::string csv_row(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  out += '\n';
  return out;
}

}  // namespace detail

namespace {

using detail::csv_row;

ArrivalSearch search_of(const AnalysisConfig& cfg) {
  ArrivalSearch s;
  s.t_max = cfg.t_max;
  s.grid_n = cfg.grid_n;
  s.bisect_tol = cfg.bisect_tol;
  s.tol = cfg.tol;
  s.threads = cfg.threads;
  return s;
}

json base_report(const std::string& analysis, const GeneratorFamily& fam, const AnalysisConfig& cfg) {
  json j;
  j["analysis"] = analysis;
  j["family"] = detail::family_json(fam);
  j["parameters"] = detail::parameters_json(cfg.raw);
  j["verdict"] = json::object();
  j["witnesses"] = json::array();
  j["tau"] = json::object();
  j["certificates"] = json::object();
  return j;
}

std::vector<double> abs_spectrum(const Superoperator& phi) {
  Eigen::ComplexEigenSolver<Matrix> es(phi.matrix(), false);
  std::vector<double> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(std::abs(es.eigenvalues()(i)));
  std::sort(out.rbegin(), out.rend());
  return out;
}

RunResult run_classify(const GeneratorFamily& fam, const EvolutionHandle& h,
                       const AnalysisConfig& cfg) {
  RunResult res;
  res.stem = "classify";
  std::vector<double> times = cfg.times;
  if (times.empty()) {
    const double t_max = cfg.t_max.value_or(default_t_max(fam));
    for (int k = 0; k <= 40; ++k) times.push_back(t_max * k / 40.0);
  }
  json rep = base_report("classify", fam, cfg);
  const int n2 = fam.dim() * fam.dim();
  std::vector<std::string> header = {"t", "min_eig_choi", "min_eig_choi_pt"};
  for (int k = 1; k <= n2; ++k) header.push_back("lambda_" + std::to_string(k));
  res.csv = csv_row(header);
  for (double t : times) {
    const Superoperator lam = h.solve(t);
    const ClassificationReport c = classify_map(lam, cfg.tol);
    const std::vector<double> spec = abs_spectrum(lam);
    json w;
    w["t"] = t;
    w["min_eig_choi"] = c.min_eig_choi;
    w["min_eig_choi_pt"] = c.min_eig_choi_pt;
    w["is_cp"] = c.is_cp;
    w["is_cocp"] = c.is_cocp;
    w["is_ppt"] = c.is_ppt;
    w["eb_status"] = std::string(to_string(c.eb_status));
    w["abs_spectrum"] = spec;
    rep["witnesses"].push_back(w);
    std::vector<std::string> row = {format_number(t), format_number(c.min_eig_choi),
                                    format_number(c.min_eig_choi_pt)};
    for (double x : spec) row.push_back(format_number(x));
    res.csv += csv_row(row);
  }
  const AsymptoticVerdict v = predict_eventually_eb(fam);
  rep["verdict"] = detail::verdict_json(v);
  const InteriorCertificate cert = eb_certify_interior(h.solve(times.back()), cfg.tol);
  rep["certificates"] = {{"t", times.back()},
                         {"eb_interior", cert.certified},
                         {"path", std::string(to_string(cert.path))},
                         {"radius", cert.radius},
                         {"distance", cert.distance}};
  res.json = rep.dump(2) + "\n";
  res.summary = "classified " + std::to_string(times.size()) + " time points; asymptotic verdict " +
                std::string(to_string(v.classification));
  return res;
}

RunResult run_arrival(const GeneratorFamily& fam, const EvolutionHandle& h,
                      const AnalysisConfig& cfg) {
  RunResult res;
  res.stem = "arrival";
  const std::vector<Cone> cones =
      cfg.cones.empty() ? std::vector<Cone>{Cone::CP, Cone::coCP, Cone::PPT, Cone::EB} : cfg.cones;
  json rep = base_report("arrival", fam, cfg);
  const AsymptoticVerdict v = predict_eventually_eb(fam);
  rep["verdict"] = detail::verdict_json(v);
  res.csv = csv_row({"cone", "tau", "kind", "status", "bracket_lo", "bracket_hi", "retention",
                     "t_max", "lower_bound_only"});
  std::map<Cone, ArrivalResult> results;
  for (Cone c : cones) {
    const ArrivalResult r = arrival_time(h, c, search_of(cfg));
    results[c] = r;
    rep["tau"][std::string(to_string(c))] = detail::arrival_json(r);
    rep["witnesses"].push_back({{"cone", std::string(to_string(c))},
                                {"horizon", r.t_max},
                                {"witness_at_horizon", r.horizon_witness}});
    rep["certificates"][std::string(to_string(c))] = std::string(to_string(r.retention));
    res.csv += csv_row({std::string(to_string(c)), format_number(r.tau),
                        std::string(to_string(r.kind)), std::string(to_string(r.status)),
                        format_number(r.bracket.first), format_number(r.bracket.second),
                        std::string(to_string(r.retention)), format_number(r.t_max),
                        r.lower_bound_only ? "true" : "false"});
  }

  // tau_CP, tau_coCP <= tau_PPT <= tau_EB; tau_EB = tau_PPT for d = 2.
  std::vector<std::string> violations;
  auto finite = [&](Cone c) {
    auto it = results.find(c);
    return it != results.end() && it->second.kind == TauKind::finite ? &it->second : nullptr;
  };
  auto check_le = [&](Cone a, Cone b) {
    const ArrivalResult* ra = finite(a);
    const ArrivalResult* rb = finite(b);
    if (ra && rb && ra->tau > rb->tau + ra->tolerance + rb->tolerance) {
      violations.push_back("tau_" + std::string(to_string(a)) + " > tau_" +
                           std::string(to_string(b)));
    }
  };
  check_le(Cone::CP, Cone::PPT);
  check_le(Cone::coCP, Cone::PPT);
  check_le(Cone::PPT, Cone::EB);
  if (fam.dim() == 2) check_le(Cone::EB, Cone::PPT);
  if (v.classification == AsymptoticClass::eventually_EB && results.count(Cone::PPT) &&
      results[Cone::PPT].kind != TauKind::finite) {
    violations.push_back("predictor says eventually EB but tau_PPT is not finite");
  }
  rep["consistency"] = {{"consistent", violations.empty()}, {"violations", violations}};
  if (!violations.empty()) res.exit_code = exit_consistency_violation;
  res.json = rep.dump(2) + "\n";
  std::ostringstream os;
  os << "arrival times:";
  for (const auto& [c, r] : results) {
    os << " " << to_string(c) << "="
       << (r.kind == TauKind::finite ? format_number(r.tau) : std::string(to_string(r.kind)));
    if (r.lower_bound_only) os << " (lower bound)";
  }
  res.summary = os.str();
  return res;
}

RunResult run_divisibility(const GeneratorFamily& fam, const EvolutionHandle& h,
                           const AnalysisConfig& cfg) {
  RunResult res;
  res.stem = "divisibility";
  const std::vector<Cone> cones =
      cfg.cones.empty() ? std::vector<Cone>{Cone::CP, Cone::PPT, Cone::EB} : cfg.cones;
  json rep = base_report("divisibility", fam, cfg);
  DivisibilityOptions opt;
  opt.search = search_of(cfg);
  opt.s_grid = cfg.s_grid;
  opt.use_shortcuts = cfg.use_shortcuts;
  res.csv = csv_row({"cone", "s", "delta", "status", "retention", "tail_witness", "verdict"});
  std::vector<DivisibilityReport> reports;
  std::ostringstream os;
  os << "eventual divisibility:";
  for (Cone c : cones) {
    DivisibilityReport r = scan_divisibility(h, c, opt);
    json jr;
    jr["verdict"] = std::string(to_string(r.verdict));
    jr["shortcut"] = std::string(to_string(r.shortcut_used));
    jr["note"] = r.note;
    json entries = json::array();
    for (const DeltaEntry& e : r.entries) {
      entries.push_back({{"s", e.s},
                         {"delta", e.delta ? num(*e.delta) : json(nullptr)},
                         {"status", std::string(to_string(e.arrival.status))},
                         {"retention", std::string(to_string(e.arrival.retention))},
                         {"tail_witness", e.tail_witness ? num(*e.tail_witness) : json(nullptr)},
                         {"refutes", e.refutes}});
      res.csv += csv_row({std::string(to_string(c)), format_number(e.s),
                          e.delta ? format_number(*e.delta) : "",
                          std::string(to_string(e.arrival.status)),
                          std::string(to_string(e.arrival.retention)),
                          e.tail_witness ? format_number(*e.tail_witness) : "",
                          std::string(to_string(r.verdict))});
    }
    jr["entries"] = entries;
    rep["tau"][std::string(to_string(c))] = jr;
    rep["certificates"][std::string(to_string(c))] = std::string(to_string(r.shortcut_used));
    os << " e" << to_string(c) << "=" << to_string(r.verdict);
    reports.push_back(std::move(r));
  }
  const ChainCheck chain = check_implication_chain(reports);
  rep["verdict"] = detail::verdict_json(predict_eventually_eb(fam));
  rep["consistency"] = {{"consistent", chain.consistent}, {"violations", chain.violations}};
  if (!chain.consistent) res.exit_code = exit_consistency_violation;
  res.json = rep.dump(2) + "\n";
  res.summary = os.str();
  return res;
}

RunResult run_ppt2(const GeneratorFamily& fam, const EvolutionHandle& h, const AnalysisConfig& cfg) {
  RunResult res;
  res.stem = "ppt2";
  json rep = base_report("ppt2", fam, cfg);
  const Superoperator phi = h.solve(cfg.map_time);
  const CompositionExperiment ex = ppt_composition_experiment(phi, cfg.n_max, cfg.tol);
  res.csv = csv_row({"n", "min_eig_choi", "min_eig_choi_pt", "eb_status"});
  for (const CompositionStep& s : ex.steps) {
    rep["witnesses"].push_back({{"n", s.n},
                                {"min_eig_choi", s.min_eig_choi},
                                {"min_eig_choi_pt", s.min_eig_choi_pt},
                                {"eb_status", std::string(to_string(s.eb_status))}});
    res.csv += csv_row({std::to_string(s.n), format_number(s.min_eig_choi),
                        format_number(s.min_eig_choi_pt), std::string(to_string(s.eb_status))});
  }
  rep["verdict"] = {{"map_time", cfg.map_time},
                    {"trace_preserving", is_trace_preserving(phi, 1e-8)},
                    {"unital", is_unital(phi, 1e-8)},
                    {"first_eb_power", ex.first_eb ? json(*ex.first_eb) : json(nullptr)}};
  res.json = rep.dump(2) + "\n";
  res.summary = ex.first_eb ? "phi^" + std::to_string(*ex.first_eb) + " is EB-certified"
                            : "no EB-certified power up to n=" + std::to_string(cfg.n_max);
  return res;
}

}  // namespace

void apply_overrides(AnalysisConfig& cfg, const Overrides& o) {
  if (o.out_dir) cfg.out_dir = *o.out_dir;
  if (o.format) {
    if (*o.format != "json" && *o.format != "csv") {
      throw Error(ErrorKind::ConfigError, "--format: expected json or csv");
    }
    cfg.format = *o.format;
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.threads) {
    if (*o.threads < 1) throw Error(ErrorKind::ConfigError, "--threads must be at least 1");
    cfg.threads = *o.threads;
  }
  if (o.t_max) {
    if (!(*o.t_max > 0.0)) throw Error(ErrorKind::ConfigError, "--tmax must be positive");
    cfg.t_max = *o.t_max;
  }
  if (o.tol) {
    if (!(*o.tol > 0.0)) throw Error(ErrorKind::ConfigError, "--tol must be positive");
    cfg.tol = *o.tol;
  }
}

RunResult run_analysis(const std::string& command, const AnalysisConfig& cfg) {
  if (!cfg.analysis.empty() && cfg.analysis != command) {
    RunResult r;
    r.exit_code = exit_config_error;
    r.summary = "config [analysis] type = " + cfg.analysis + " does not match command " + command;
    return r;
  }
  try {
    if (command == "reproduce") return detail::run_reproduce(cfg);
    std::shared_ptr<const GeneratorFamily> fam;
    try {
      fam = build_family(cfg.raw);
    } catch (const Error& e) {
      RunResult r;
      r.exit_code = exit_config_error;
      r.summary = e.what();
      return r;
    }
    const EvolutionHandle handle(fam);
    if (command == "classify") return run_classify(*fam, handle, cfg);
    if (command == "arrival") return run_arrival(*fam, handle, cfg);
    if (command == "divisibility") return run_divisibility(*fam, handle, cfg);
    if (command == "ppt2") return run_ppt2(*fam, handle, cfg);
    RunResult r;
    r.exit_code = exit_config_error;
    r.summary = "unknown command '" + command + "'";
    return r;
  } catch (const Error& e) {
    RunResult r;
    r.exit_code = e.kind() == ErrorKind::ConfigError ? exit_config_error : exit_numerical_failure;
    r.summary = e.what();
    return r;
  }
}

std::string write_report(const RunResult& result, const AnalysisConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  const fs::path path = fs::path(cfg.out_dir) / (result.stem + "." + cfg.format);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::ConfigError, "cannot write " + path.string());
  out << (cfg.format == "csv" ? result.csv : result.json);
  return path.string();
}

std::string list_families_text() {
  std::ostringstream os;
  for (FamilyKind k : all_family_kinds()) {
    os << to_string(k) << ":";
    for (const std::string& key : family_keys(k)) os << " " << key;
    os << "\n";
  }
  return os.str();
}

}  // namespace ebflow::cli
