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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ebflow/cli/config.hpp"
#include "ebflow/cli/run.hpp"
#include "ebflow/errors.hpp"

using namespace ebflow;
using namespace ebflow::cli;

namespace {

std::string config_error_message(const std::string& text) {
  try {
    build_analysis_config(parse_config_text(text, "test.ini"));
    build_family(parse_config_text(text, "test.ini"));
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigError);
    return e.what();
  }
  return "";
}

const char* kPhaseCovariant = R"(
[family]
kind = phase_covariant
gamma_plus = 1
gamma_minus = 1
gamma_z = -0.4

[analysis]
cones = CP, PPT, EB
grid_n = 400
)";

}  // namespace

TEST(ConfigValues, Complex) {
  EXPECT_EQ(parse_complex("1-2i"), cplx(1, -2));
  EXPECT_EQ(parse_complex("0.5i"), cplx(0, 0.5));
  EXPECT_EQ(parse_complex("-i"), cplx(0, -1));
  EXPECT_EQ(parse_complex("3"), cplx(3, 0));
  EXPECT_EQ(parse_complex("1e-3+2e1i"), cplx(1e-3, 20));
  EXPECT_THROW(parse_complex("1+"), Error);
  EXPECT_THROW(parse_complex("abc"), Error);
}

TEST(ConfigValues, MatrixAndLists) {
  const Matrix m = parse_matrix("1 2i; -2i 3");
  ASSERT_EQ(m.rows(), 2);
  EXPECT_EQ(m(0, 1), cplx(0, 2));
  EXPECT_EQ(m(1, 0), cplx(0, -2));
  EXPECT_EQ(parse_matrix("sm"), pauli::sigma_minus());
  EXPECT_THROW(parse_matrix("1 2; 3"), Error);
  EXPECT_EQ(parse_real_list("0.5, 0.25,0.25").size(), 3u);
  EXPECT_THROW(parse_real("1.0x"), Error);
}

TEST(ConfigParser, DiagnosticsCarryLineNumbers) {
  EXPECT_NE(config_error_message("[family]\nkind = pauli\ngamma4 = 1\n").find("test.ini:3"), std::string::npos);
  EXPECT_NE(config_error_message("[family]\nkind = pauli\ngamma1 = 1\ngamma1 = 2\n").find("test.ini:4"),
            std::string::npos);
  EXPECT_NE(config_error_message("[family]\nkind = pauli\n[oops]\n").find("unknown section"), std::string::npos);
  EXPECT_NE(config_error_message("[family]\nkind = nope\n").find("unknown family kind"), std::string::npos);
  EXPECT_NE(config_error_message("[family]\nkind = pauli\n[analysis]\ntol = -1\n").find("tol"),
            std::string::npos);
  EXPECT_NE(config_error_message("[family]\nkind = depolarizing\ngamma = 1\nomega = 0.1,0.1,0.1,0.1,0.1,0.1,0.1,0.1,0.2\n")
                .find("outside 2..8"),
            std::string::npos);
  EXPECT_NE(config_error_message("[family]\nkind = eternal_nm\nalpha = -1\n").find("rejected"), std::string::npos);
  EXPECT_NE(config_error_message("kind = pauli\n").find("outside of a section"), std::string::npos);
}

TEST(ConfigParser, AcceptsEveryKind) {
  const std::vector<std::string> texts = {
      "[family]\nkind = gkls\nd = 2\njump.1 = sm\nrate.1 = 1\n",
      "[family]\nkind = pauli\ngamma1 = 1\ngamma2 = 1\ngamma3 = 1\n",
      "[family]\nkind = phase_covariant\ngamma_minus = 1\n",
      "[family]\nkind = eternal_nm\nalpha = 2\n",
      "[family]\nkind = depolarizing\ngamma = 1\nomega = 0.5, 0.5\n",
      "[family]\nkind = detailed_balance\nhamiltonian = 0 0; 0 1\nbeta = 1\njump.1 = sm\nfrequency.1 = -1\n",
      "[family]\nkind = floquet\ndrive_hamiltonian = 3.141592653589793 0; 0 0\nperiod = 2\n"
      "[core]\nkind = depolarizing\ngamma = 1\nomega = 0.5, 0.5\n",
      "[family]\nkind = pure_decoherence\nh = 0, 1\na = 1 0.5; 0.5 1\ncutoff = 3\n",
      "[family]\nkind = diagonally_covariant\nh = 0, 1\na = 1 0; 0 1\nb = 0 1; 0.5 0\n",
  };
  for (const std::string& t : texts) {
    EXPECT_NO_THROW(build_family(parse_config_text(t))) << t;
  }
}

TEST(Run, ReportsAreDeterministic) {
  AnalysisConfig cfg = build_analysis_config(parse_config_text(kPhaseCovariant, "pc.ini"));
  const RunResult a = run_analysis("arrival", cfg);
  cfg.threads = 3;
  const RunResult b = run_analysis("arrival", cfg);
  EXPECT_EQ(a.exit_code, exit_ok);
  EXPECT_EQ(a.json, b.json);
  EXPECT_EQ(a.csv, b.csv);
  EXPECT_NE(a.json.find("\"PPT\""), std::string::npos);
  EXPECT_EQ(a.csv.substr(0, a.csv.find('\n')),
            "cone,tau,kind,status,bracket_lo,bracket_hi,retention,t_max,lower_bound_only");
}

TEST(Run, ClassifyCsvHeader) {
  AnalysisConfig cfg = build_analysis_config(parse_config_text(
      "[family]\nkind = pauli\ngamma1 = 1\ngamma2 = 1\ngamma3 = 1\n[analysis]\ntimes = 0, 1\n"));
  const RunResult r = run_analysis("classify", cfg);
  std::istringstream in(r.csv);
  std::string header, row0, row1;
  std::getline(in, header);
  std::getline(in, row0);
  std::getline(in, row1);
  EXPECT_EQ(header, "t,min_eig_choi,min_eig_choi_pt,lambda_1,lambda_2,lambda_3,lambda_4");
  EXPECT_EQ(row0.substr(0, 2), "0,");
}

TEST(Run, ExitCodes) {
  AnalysisConfig cfg = build_analysis_config(parse_config_text(
      "[family]\nkind = pauli\ngamma1 = 1\n[analysis]\ntype = classify\n"));
  EXPECT_EQ(run_analysis("arrival", cfg).exit_code, exit_config_error);
  // Past the cutoff the map is singular, so the direct propagator cannot be formed.
  AnalysisConfig sing = build_analysis_config(parse_config_text(
      "[family]\nkind = pure_decoherence\nh = 0, 1\na = 1 0.5; 0.5 1\ncutoff = 1\n"
      "[analysis]\nshortcuts = false\ncones = CP\n"));
  EXPECT_EQ(run_analysis("divisibility", sing).exit_code, exit_numerical_failure);
}

TEST(Run, OverridesAndWriting) {
  AnalysisConfig cfg = build_analysis_config(parse_config_text(
      "[family]\nkind = eternal_nm\nalpha = 2\n[analysis]\nmap_time = 1\nn_max = 4\n"));
  const auto dir = std::filesystem::temp_directory_path() / "ebflow_cli_test";
  Overrides o;
  o.out_dir = dir.string();
  o.format = "csv";
  apply_overrides(cfg, o);
  const RunResult r = run_analysis("ppt2", cfg);
  ASSERT_EQ(r.exit_code, exit_ok);
  const std::string path = write_report(r, cfg);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), r.csv);
  Overrides bad;
  bad.tol = -1.0;
  EXPECT_THROW(apply_overrides(cfg, bad), Error);
  std::filesystem::remove_all(dir);
}

TEST(Run, FormatNumber) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(2.0), "2");
  EXPECT_EQ(format_number(INFINITY), "inf");
}
