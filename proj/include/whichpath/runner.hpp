// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "whichpath/branches.hpp"
#include "whichpath/scenario.hpp"

namespace whichpath::cli {

enum class Format { Csv, Json, Svg };

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double bound = 0.0;
};

struct RunReport {
  std::string scenario;
  std::vector<std::string> files;
  std::vector<CheckResult> checks;
  double wall_ms = 0.0;

  bool all_passed() const;
};

/// Everything a scenario computes, before any file is written.
struct RunData {
  std::optional<hilbert::StateVector> joint;
  std::vector<optics::ScreenPattern> patterns;
  std::optional<branches::BranchDecomposition> macro2;
  std::optional<branches::BranchDecomposition> micro;
  std::optional<std::map<std::string, std::uint64_t>> counts;
  nlohmann::json bell_report;  // null when the scenario has no bell block
  std::vector<CheckResult> checks;
};

/// Run the scenario in memory: build states, patterns, branch tables,
/// samples, bell statistics, and the scenario's invariant checks.
RunData run_scenario(const Scenario& s);

/// run_scenario plus artifact emission into out_dir. Identical inputs produce
/// byte-identical CSV/JSON artifacts.
RunReport run(const Scenario& s, const std::filesystem::path& out_dir,
              const std::set<Format>& formats);

}  // namespace whichpath::cli
