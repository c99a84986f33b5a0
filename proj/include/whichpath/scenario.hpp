// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "whichpath/bell.hpp"
#include "whichpath/detectors.hpp"
#include "whichpath/hilbert.hpp"
#include "whichpath/optics.hpp"

namespace whichpath::cli {

struct ObserverOptions {
  bool attach_arrow_cat = false;
  bool eyes_closed = false;
};

struct SamplingOptions {
  std::uint64_t trials = 0;
  std::uint64_t seed = 42;
};

enum class BellOrder { RemoteFirst, LocalFirst, Both };

struct BellOptions {
  std::vector<bell::MeasurementAxis> remote_axes;
  bell::MeasurementAxis local_axis{0.0, 0.0, 1.0};
  BellOrder order = BellOrder::Both;
};

/// No detector inserted when the variant holds monostate.
using DetectorModel = std::variant<std::monostate, detectors::QubitDetector,
                                   detectors::MoleculeDetector, detectors::Bolometer>;

/// One runnable experiment: geometry, initial path amplitudes, an optional
/// detector with readout/observer options, sampling, and Bell settings.
struct Scenario {
  std::string name;
  std::string description;
  optics::SlitGeometry geometry;
  optics::ScreenGrid grid;
  hilbert::cplx amp_left;
  hilbert::cplx amp_right;
  DetectorModel detector;
  std::optional<detectors::ReadoutBasis> readout;
  ObserverOptions observers;
  SamplingOptions sampling;
  std::optional<BellOptions> bell;

  bool has_detector() const { return !std::holds_alternative<std::monostate>(detector); }
};

/// Parse and fully validate a scenario document. Unknown keys are rejected;
/// errors carry the origin and, for parse errors, the line number.
Scenario parse_scenario(const std::string& text, const std::string& origin);

/// Load from a file path or by built-in name.
Scenario load_scenario(const std::string& path_or_name);

bool is_builtin(const std::string& name);
Scenario builtin_scenario(const std::string& name);

/// Stable list of built-in scenario names with one-line descriptions.
std::vector<std::pair<std::string, std::string>> list_scenarios();

}  // namespace whichpath::cli
