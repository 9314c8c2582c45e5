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

#include "ebflow/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "ebflow/errors.hpp"

namespace ebflow::cli {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

[[noreturn]] void config_error(const std::string& where, const std::string& msg) {
  throw Error(ErrorKind::ConfigError, where + ": " + msg);
}

std::string at(const std::string& origin, int line) {
  return origin + ":" + std::to_string(line);
}

bool is_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

// Tracks which keys of a section were consumed, so leftovers can be
// rejected as unknown.
class Reader {
 public:
  Reader(const Section& s, const std::string& origin) : s_(s), origin_(origin) {}

  bool has(const std::string& key) const { return s_.find(key) != nullptr; }

  template <typename F>
  auto parse(const std::string& key, F&& f) -> decltype(f(std::string())) {
    const Entry* e = s_.find(key);
    used_.insert(key);
    try {
      return f(e->value);
    } catch (const Error& err) {
      config_error(at(origin_, e->line), "field '" + key + "': " + err.what());
    }
  }

  double real(const std::string& key, std::optional<double> fallback = std::nullopt) {
    if (!has(key)) {
      if (fallback) return *fallback;
      missing(key);
    }
    return parse(key, parse_real);
  }

  int integer(const std::string& key, std::optional<int> fallback = std::nullopt) {
    const double v = real(key, fallback ? std::optional<double>(*fallback) : std::nullopt);
    if (v != std::floor(v) || std::abs(v) > 1e9) fail(key, "expected an integer");
    return static_cast<int>(v);
  }

  Matrix matrix(const std::string& key) {
    if (!has(key)) missing(key);
    return parse(key, parse_matrix);
  }

  std::vector<double> list(const std::string& key) {
    if (!has(key)) missing(key);
    return parse(key, parse_real_list);
  }

  std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    if (!has(key)) {
      if (fallback) return *fallback;
      missing(key);
    }
    used_.insert(key);
    return s_.find(key)->value;
  }

  /// Sorted N for keys "prefix.N".
  std::vector<int> indices(const std::string& prefix) const {
    std::vector<int> out;
    for (const auto& [k, e] : s_.entries) {
      if (k.rfind(prefix + ".", 0) != 0) continue;
      const std::string tail = k.substr(prefix.size() + 1);
      if (tail.empty() || !std::all_of(tail.begin(), tail.end(), ::isdigit)) {
        config_error(at(origin_, e.line), "field '" + k + "': index must be a positive integer");
      }
      out.push_back(std::stoi(tail));
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    const Entry* e = s_.find(key);
    config_error(at(origin_, e ? e->line : s_.line), "field '" + key + "': " + msg);
  }

  [[noreturn]] void missing(const std::string& key) const {
    config_error(at(origin_, s_.line),
                 "section [" + s_.name + "] is missing required field '" + key + "'");
  }

  void finish() const {
    for (const auto& [k, e] : s_.entries) {
      if (!used_.count(k)) {
        config_error(at(origin_, e.line), "unknown field '" + k + "' in [" + s_.name + "]");
      }
    }
  }

  const Section& section() const { return s_; }
  const std::string& origin() const { return origin_; }

 private:
  const Section& s_;
  const std::string& origin_;
  std::set<std::string> used_;
};

std::vector<RateFunction> constant_rates(const std::vector<double>& v) {
  std::vector<RateFunction> out;
  for (double x : v) out.push_back(RateFunction::constant_rate(x));
  return out;
}

void check_dim(Reader& r, int d, const std::string& key) {
  if (d < 2 || d > 8) r.fail(key, "dimension " + std::to_string(d) + " outside 2..8");
}

GeneratorFamily build_from_section(Reader& r, const RawConfig& raw, bool allow_core);

GeneratorFamily build_kind(FamilyKind kind, Reader& r, const RawConfig& raw, bool allow_core) {
  switch (kind) {
    case FamilyKind::gkls: {
      const int d = r.integer("d");
      check_dim(r, d, "d");
      Matrix h = r.has("hamiltonian") ? r.matrix("hamiltonian") : Matrix::Zero(d, d);
      if (h.rows() != d) r.fail("hamiltonian", "size differs from d");
      std::vector<LindbladTerm> terms;
      for (int k : r.indices("jump")) {
        const std::string jk = "jump." + std::to_string(k);
        const std::string rk = "rate." + std::to_string(k);
        Matrix v = r.matrix(jk);
        if (v.rows() != d) r.fail(jk, "size differs from d");
        terms.push_back({v, RateFunction::constant_rate(r.real(rk))});
      }
      for (int k : r.indices("rate")) {
        if (!r.has("jump." + std::to_string(k))) {
          r.fail("rate." + std::to_string(k), "no matching jump." + std::to_string(k));
        }
      }
      return gkls(h, terms);
    }
    case FamilyKind::pauli:
      return pauli_channel(RateFunction::constant_rate(r.real("gamma1", 0.0)),
                           RateFunction::constant_rate(r.real("gamma2", 0.0)),
                           RateFunction::constant_rate(r.real("gamma3", 0.0)));
    case FamilyKind::phase_covariant: {
      PhaseCovariantParams q;
      q.omega = r.real("frequency", 0.0);
      q.gamma_plus = r.real("gamma_plus", 0.0);
      q.gamma_minus = r.real("gamma_minus", 0.0);
      q.gamma_z = r.real("gamma_z", 0.0);
      return phase_covariant(q);
    }
    case FamilyKind::eternal_nm:
      return eternal_nm(r.real("alpha"));
    case FamilyKind::depolarizing: {
      const double gamma = r.real("gamma");
      Matrix omega;
      if (r.has("omega_matrix")) {
        omega = r.matrix("omega_matrix");
        if (r.has("omega")) r.fail("omega", "give either omega or omega_matrix");
      } else {
        const std::vector<double> w = r.list("omega");
        omega = Matrix::Zero(static_cast<int>(w.size()), static_cast<int>(w.size()));
        for (std::size_t i = 0; i < w.size(); ++i) omega(i, i) = w[i];
      }
      const std::string key = r.has("omega_matrix") ? "omega_matrix" : "omega";
      check_dim(r, static_cast<int>(omega.rows()), key);
      if (r.has("d") && r.integer("d") != omega.rows()) r.fail("d", "does not match omega");
      return depolarizing(gamma, omega);
    }
    case FamilyKind::detailed_balance: {
      const Matrix h = r.matrix("hamiltonian");
      check_dim(r, static_cast<int>(h.rows()), "hamiltonian");
      std::vector<BohrTerm> terms;
      for (int k : r.indices("jump")) {
        const std::string jk = "jump." + std::to_string(k);
        Matrix v = r.matrix(jk);
        if (v.rows() != h.rows()) r.fail(jk, "size differs from hamiltonian");
        terms.push_back({v, r.real("frequency." + std::to_string(k))});
      }
      for (int k : r.indices("frequency")) {
        if (!r.has("jump." + std::to_string(k))) {
          r.fail("frequency." + std::to_string(k), "no matching jump." + std::to_string(k));
        }
      }
      return detailed_balance(h, terms, r.real("beta"));
    }
    case FamilyKind::floquet: {
      if (!allow_core) r.fail("kind", "a Floquet core cannot itself be Floquet");
      const Matrix k = r.matrix("drive_hamiltonian");
      check_dim(r, static_cast<int>(k.rows()), "drive_hamiltonian");
      const double period = r.real("period");
      const Section* core = raw.section("core");
      if (core == nullptr) {
        config_error(at(raw.origin, r.section().line), "Floquet family needs a [core] section");
      }
      Reader cr(*core, raw.origin);
      auto core_family = std::make_shared<const GeneratorFamily>(build_from_section(cr, raw, false));
      if (core_family->dim() != k.rows()) {
        config_error(at(raw.origin, core->line), "[core] dimension differs from drive_hamiltonian");
      }
      return floquet_product(k, period, core_family);
    }
    case FamilyKind::pure_decoherence: {
      const std::vector<double> h = r.list("h");
      check_dim(r, static_cast<int>(h.size()), "h");
      const Matrix a = r.matrix("a");
      if (a.rows() != static_cast<Eigen::Index>(h.size())) r.fail("a", "size differs from len(h)");
      std::optional<double> cutoff;
      if (r.has("cutoff")) cutoff = r.real("cutoff");
      return pure_decoherence(constant_rates(h), MatrixFunction::constant_matrix(a), cutoff);
    }
    case FamilyKind::diagonally_covariant: {
      const std::vector<double> h = r.list("h");
      check_dim(r, static_cast<int>(h.size()), "h");
      const Matrix a = r.matrix("a");
      const Matrix b = r.matrix("b");
      if (a.rows() != static_cast<Eigen::Index>(h.size())) r.fail("a", "size differs from len(h)");
      if (b.rows() != static_cast<Eigen::Index>(h.size())) r.fail("b", "size differs from len(h)");
      return diagonally_covariant(constant_rates(h), MatrixFunction::constant_matrix(a),
                                  MatrixFunction::constant_matrix(b));
    }
  }
  r.fail("kind", "unsupported kind");
}

GeneratorFamily build_from_section(Reader& r, const RawConfig& raw, bool allow_core) {
  const std::string kind_text = r.text("kind");
  FamilyKind kind;
  try {
    kind = family_kind_from_string(kind_text);
  } catch (const Error&) {
    r.fail("kind", "unknown family kind '" + kind_text + "' (see list-families)");
  }
  std::optional<GeneratorFamily> fam;
  try {
    fam.emplace(build_kind(kind, r, raw, allow_core));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError) throw;
    config_error(at(raw.origin, r.section().line),
                 "[" + r.section().name + "] rejected: " + std::string(e.what()));
  }
  r.finish();
  return std::move(*fam);
}

}  // namespace

const Entry* Section::find(const std::string& key) const {
  auto it = entries.find(key);
  return it == entries.end() ? nullptr : &it->second;
}

const Section* RawConfig::section(std::string_view name) const {
  for (const auto& s : sections) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

RawConfig parse_config_text(std::string_view text, std::string origin) {
  static const std::set<std::string> kSections = {"family", "core", "analysis", "output"};
  RawConfig cfg;
  cfg.origin = std::move(origin);
  std::istringstream is{std::string(text)};
  std::string line;
  int lineno = 0;
  Section* cur = nullptr;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string s = trim(line);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') config_error(at(cfg.origin, lineno), "malformed section header");
      const std::string name = trim(std::string_view(s).substr(1, s.size() - 2));
      if (!kSections.count(name)) {
        config_error(at(cfg.origin, lineno), "unknown section [" + name + "]");
      }
      if (cfg.section(name)) config_error(at(cfg.origin, lineno), "duplicate section [" + name + "]");
      cfg.sections.push_back({name, lineno, {}});
      cur = &cfg.sections.back();
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) config_error(at(cfg.origin, lineno), "expected 'key = value'");
    if (cur == nullptr) config_error(at(cfg.origin, lineno), "field outside of a section");
    const std::string key = trim(std::string_view(s).substr(0, eq));
    const std::string value = trim(std::string_view(s).substr(eq + 1));
    if (key.empty() || !std::all_of(key.begin(), key.end(), is_key_char)) {
      config_error(at(cfg.origin, lineno), "invalid field name '" + key + "'");
    }
    if (value.empty()) config_error(at(cfg.origin, lineno), "field '" + key + "' has no value");
    if (cur->entries.count(key)) {
      config_error(at(cfg.origin, lineno), "duplicate field '" + key + "' in [" + cur->name + "]");
    }
    cur->entries[key] = {value, lineno};
  }
  if (!cfg.section("family")) config_error(cfg.origin, "missing [family] section");
  return cfg;
}

RawConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, path + ": cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

AnalysisConfig build_analysis_config(RawConfig raw) {
  AnalysisConfig cfg;
  cfg.raw = std::move(raw);
  const RawConfig& rc = cfg.raw;
  if (const Section* s = rc.section("analysis")) {
    Reader r(*s, rc.origin);
    cfg.analysis = r.text("type", "");
    if (r.has("times")) cfg.times = r.list("times");
    if (r.has("cones")) {
      for (const std::string& c : split(r.text("cones"), ',')) {
        try {
          cfg.cones.push_back(cone_from_string(c));
        } catch (const Error&) {
          r.fail("cones", "unknown cone '" + c + "'");
        }
      }
    }
    if (r.has("s_grid")) cfg.s_grid = r.list("s_grid");
    if (r.has("tmax")) cfg.t_max = r.real("tmax");
    cfg.grid_n = r.integer("grid_n", cfg.grid_n);
    if (r.has("bisect_tol")) cfg.bisect_tol = r.real("bisect_tol");
    cfg.tol = r.real("tol", cfg.tol);
    if (r.has("shortcuts")) {
      const std::string v = r.text("shortcuts");
      if (v != "true" && v != "false") r.fail("shortcuts", "expected true or false");
      cfg.use_shortcuts = v == "true";
    }
    cfg.n_max = r.integer("n_max", cfg.n_max);
    cfg.map_time = r.real("map_time", cfg.map_time);
    const double seed = r.real("seed", 0.0);
    if (seed < 0 || seed != std::floor(seed)) r.fail("seed", "expected a nonnegative integer");
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.threads = r.integer("threads", cfg.threads);

    if (cfg.t_max && !(*cfg.t_max > 0.0)) r.fail("tmax", "must be positive");
    if (!(cfg.tol > 0.0)) r.fail("tol", "must be positive");
    if (cfg.bisect_tol && !(*cfg.bisect_tol > 0.0)) r.fail("bisect_tol", "must be positive");
    if (cfg.grid_n < 2) r.fail("grid_n", "must be at least 2");
    if (cfg.n_max < 1) r.fail("n_max", "must be at least 1");
    if (!(cfg.map_time >= 0.0)) r.fail("map_time", "must be nonnegative");
    if (cfg.threads < 1) r.fail("threads", "must be at least 1");
    for (double t : cfg.times) {
      if (!(t >= 0.0)) r.fail("times", "times must be nonnegative");
    }
    for (double s : cfg.s_grid) {
      if (!(s >= 0.0)) r.fail("s_grid", "entries must be nonnegative");
    }
    r.finish();
  }
  if (const Section* s = rc.section("output")) {
    Reader r(*s, rc.origin);
    cfg.out_dir = r.text("dir", cfg.out_dir);
    cfg.format = r.text("format", cfg.format);
    if (cfg.format != "json" && cfg.format != "csv") r.fail("format", "expected json or csv");
    r.finish();
  }
  return cfg;
}

std::shared_ptr<const GeneratorFamily> build_family(const RawConfig& raw) {
  const Section* fs = raw.section("family");
  if (!fs) config_error(raw.origin, "missing [family] section");
  Reader r(*fs, raw.origin);
  auto fam = std::make_shared<const GeneratorFamily>(build_from_section(r, raw, true));
  if (fam->kind() != FamilyKind::floquet && raw.section("core")) {
    config_error(at(raw.origin, raw.section("core")->line),
                 "[core] is only valid for Floquet families");
  }
  return fam;
}

std::vector<std::string> family_keys(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::gkls: return {"d", "hamiltonian", "jump.N", "rate.N"};
    case FamilyKind::pauli: return {"gamma1", "gamma2", "gamma3"};
    case FamilyKind::phase_covariant:
      return {"frequency", "gamma_plus", "gamma_minus", "gamma_z"};
    case FamilyKind::eternal_nm: return {"alpha"};
    case FamilyKind::depolarizing: return {"gamma", "omega | omega_matrix", "d"};
    case FamilyKind::detailed_balance: return {"hamiltonian", "beta", "jump.N", "frequency.N"};
    case FamilyKind::floquet: return {"drive_hamiltonian", "period", "[core] section"};
    case FamilyKind::pure_decoherence: return {"h", "a", "cutoff"};
    case FamilyKind::diagonally_covariant: return {"h", "a", "b"};
  }
  return {};
}

double parse_real(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) throw Error(ErrorKind::ConfigError, "empty number");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) {
    throw Error(ErrorKind::ConfigError, "'" + s + "' is not a finite real number");
  }
  return v;
}

cplx parse_complex(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) throw Error(ErrorKind::ConfigError, "empty number");
  if (s.back() != 'i') return {parse_real(s), 0.0};
  const std::string body = s.substr(0, s.size() - 1);
  std::size_t split_at = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split_at = k;
      break;
    }
  }
  const std::string re = split_at == std::string::npos ? "0" : body.substr(0, split_at);
  std::string im = split_at == std::string::npos ? body : body.substr(split_at);
  if (im.empty() || im == "+") im = "1";
  if (im == "-") im = "-1";
  try {
    return {parse_real(re), parse_real(im)};
  } catch (const Error&) {
    throw Error(ErrorKind::ConfigError, "'" + s + "' is not a complex number");
  }
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  for (const std::string& item : split(text, ',')) out.push_back(parse_real(item));
  if (out.empty()) throw Error(ErrorKind::ConfigError, "empty list");
  return out;
}

Matrix parse_matrix(const std::string& text) {
  const std::string s = trim(text);
  if (s == "sx") return pauli::sigma(1);
  if (s == "sy") return pauli::sigma(2);
  if (s == "sz") return pauli::sigma(3);
  if (s == "sp") return pauli::sigma_plus();
  if (s == "sm") return pauli::sigma_minus();
  std::vector<std::vector<cplx>> rows;
  for (const std::string& row : split(s, ';')) {
    std::istringstream is(row);
    std::vector<cplx> entries;
    std::string tok;
    while (is >> tok) entries.push_back(parse_complex(tok));
    if (entries.empty()) throw Error(ErrorKind::ConfigError, "empty matrix row");
    rows.push_back(std::move(entries));
  }
  const std::size_t n = rows.size();
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) {
      throw Error(ErrorKind::ConfigError, "matrix must be square (" + std::to_string(n) +
                                              " rows, row " + std::to_string(i + 1) + " has " +
                                              std::to_string(rows[i].size()) + " entries)");
    }
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

}  // namespace ebflow::cli
