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

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ebflow/cli/config.hpp"
#include "ebflow/cli/run.hpp"
#include "ebflow/errors.hpp"

namespace {

struct Flags {
  std::string config;
  ebflow::cli::Overrides overrides;
};

void add_common(CLI::App* sub, Flags& f, bool config_required) {
  auto* opt = sub->add_option("--config", f.config, "analysis config file");
  if (config_required) opt->required();
  sub->add_option("--out", f.overrides.out_dir, "output directory");
  sub->add_option("--format", f.overrides.format, "report format")
      ->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--seed", f.overrides.seed, "random seed");
  sub->add_option("--threads", f.overrides.threads, "worker threads for grid scans");
  sub->add_option("--tmax", f.overrides.t_max, "time horizon");
  sub->add_option("--tol", f.overrides.tol, "cone membership tolerance");
}

int run(const std::string& command, const Flags& f) {
  using namespace ebflow::cli;
  AnalysisConfig cfg;
  try {
    cfg = f.config.empty() ? AnalysisConfig{} : build_analysis_config(load_config(f.config));
    apply_overrides(cfg, f.overrides);
  } catch (const ebflow::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config_error;
  }
  const RunResult res = run_analysis(command, cfg);
  if (res.stem.empty()) {
    std::cerr << (res.exit_code == exit_config_error ? "config error: " : "error: ") << res.summary
              << "\n";
    return res.exit_code;
  }
  try {
    const std::string path = write_report(res, cfg);
    std::cout << res.summary << "\nreport: " << path << "\n";
  } catch (const ebflow::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config_error;
  }
  return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entanglement-breaking analysis of quantum dynamical maps"};
  app.require_subcommand(1);

  Flags flags;
  std::string command;
  for (const char* name : {"classify", "arrival", "divisibility", "ppt2"}) {
    CLI::App* sub = app.add_subcommand(name, "");
    add_common(sub, flags, true);
    sub->callback([&command, name] { command = name; });
  }
  app.get_subcommand("classify")->description("cone membership along Lambda_t on a time grid");
  app.get_subcommand("arrival")->description("arrival times into the CP, coCP, PPT and EB cones");
  app.get_subcommand("divisibility")->description("eventual divisibility scan over s");
  app.get_subcommand("ppt2")->description("compositions phi^n of one map with PPT checks");

  CLI::App* repro = app.add_subcommand("reproduce", "table of reference checks");
  add_common(repro, flags, false);
  repro->callback([&command] { command = "reproduce"; });

  CLI::App* list = app.add_subcommand("list-families", "catalog kinds and their config keys");
  list->callback([&command] { command = "list-families"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : ebflow::cli::exit_config_error;
  }

  if (command == "list-families") {
    std::cout << ebflow::cli::list_families_text();
    return 0;
  }
  return run(command, flags);
}
