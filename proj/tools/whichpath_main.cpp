// SPDX-License-Identifier: Apache-2.0
//
// Scenario-driven front end: `run` emits pattern/branch/statistics artifacts,
// `list` shows the built-in scenarios, `check` runs the invariant suite.
// Exit codes: 0 ok, 1 configuration error, 2 invariant failure, 3 I/O error.

#include <cstdio>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "whichpath/errors.hpp"
#include "whichpath/runner.hpp"
#include "whichpath/scenario.hpp"

namespace {

using whichpath::cli::CheckResult;
using whichpath::cli::Format;

std::set<Format> parse_formats(const std::string& spec) {
  std::set<Format> formats;
  std::stringstream ss(spec);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token == "csv")
      formats.insert(Format::Csv);
    else if (token == "json")
      formats.insert(Format::Json);
    else if (token == "svg")
      formats.insert(Format::Svg);
    else if (!token.empty())
      throw whichpath::ConfigError("unknown format '" + token + "' (use csv, json, svg)");
  }
  if (formats.empty()) throw whichpath::ConfigError("no output format selected");
  return formats;
}

void print_checks(const std::vector<CheckResult>& checks) {
  char buf[64];
  for (const CheckResult& c : checks) {
    std::snprintf(buf, sizeof(buf), "%.3g", c.measured);
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << "  measured=" << buf;
    std::snprintf(buf, sizeof(buf), "%.3g", c.bound);
    std::cout << " bound=" << buf << "\n";
  }
}

int run_command(const std::string& scenario_arg, const std::string& out_dir,
                const std::string& format_spec, std::uint64_t seed, bool seed_set) {
  whichpath::cli::Scenario scenario = whichpath::cli::load_scenario(scenario_arg);
  if (seed_set) scenario.sampling.seed = seed;

  const auto report = whichpath::cli::run(scenario, out_dir, parse_formats(format_spec));

  std::cout << "scenario: " << report.scenario << "\n";
  for (const std::string& f : report.files) std::cout << "wrote: " << f << "\n";
  print_checks(report.checks);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f", report.wall_ms);
  std::cout << "wall: " << buf << " ms\n";
  return report.all_passed() ? 0 : 2;
}

int check_command(const std::string& scenario_arg) {
  std::vector<std::string> names;
  if (!scenario_arg.empty()) {
    names.push_back(scenario_arg);
  } else {
    for (const auto& [name, description] : whichpath::cli::list_scenarios())
      names.push_back(name);
  }

  bool ok = true;
  for (const std::string& name : names) {
    const auto scenario = whichpath::cli::load_scenario(name);
    const auto data = whichpath::cli::run_scenario(scenario);
    std::cout << "== " << name << "\n";
    print_checks(data.checks);
    for (const CheckResult& c : data.checks) ok = ok && c.pass;
  }
  return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"which-path interferometer simulator"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "run a scenario and emit artifacts");
  std::string scenario_arg;
  std::string out_dir = "out";
  std::string format_spec = "csv,json";
  std::uint64_t seed = 0;
  run_cmd->add_option("--scenario", scenario_arg, "built-in name or path to a scenario file")
      ->required();
  run_cmd->add_option("--out", out_dir, "output directory")->envname("WHICHPATH_OUT");
  run_cmd->add_option("--format", format_spec, "comma list of csv,json,svg");
  auto* seed_opt =
      run_cmd->add_option("--seed", seed, "override the sampling seed")->envname("WHICHPATH_SEED");

  auto* list_cmd = app.add_subcommand("list", "list built-in scenarios");

  auto* check_cmd = app.add_subcommand("check", "run invariant checks without writing files");
  std::string check_scenario;
  check_cmd->add_option("--scenario", check_scenario,
                        "restrict to one scenario (default: all built-ins)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (list_cmd->parsed()) {
      for (const auto& [name, description] : whichpath::cli::list_scenarios())
        std::cout << name << "  -  " << description << "\n";
      return 0;
    }
    if (run_cmd->parsed())
      return run_command(scenario_arg, out_dir, format_spec, seed, seed_opt->count() > 0);
    if (check_cmd->parsed()) return check_command(check_scenario);
  } catch (const whichpath::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const whichpath::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
