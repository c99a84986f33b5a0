// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "whichpath/detectors.hpp"
#include "whichpath/hilbert.hpp"
#include "whichpath/optics.hpp"

#include <json.hpp>

namespace whichpath::branches {

using hilbert::StateVector;

enum class DetectorSide { Cold, Hot };
enum class Grouping { Macro2, Micro };

/// Macroscopic record labels. Fields are optional so the same type serves as
/// both a branch tag (fields filled as far as the state carries them) and a
/// query (fields filled as far as the caller constrains them).
struct MacroLabel {
  std::optional<DetectorSide> detector;
  std::optional<std::size_t> hot_config;  ///< 1-based first-hit index (Micro grouping)
  std::optional<char> arrow;              ///< 'L' or 'R'
  std::optional<std::string> cat;         ///< "sawL", "sawR", "closedL", "closedR"
};

std::string to_string(const MacroLabel& label);

/// Does `label` satisfy every field the query specifies?
bool matches(const MacroLabel& label, const MacroLabel& query);

struct BranchRecord {
  MacroLabel label;
  double weight = 0.0;         ///< Born weight = norm(component)^2
  StateVector component;       ///< unnormalized projection of the global state
};

struct BranchDecomposition {
  std::vector<BranchRecord> branches;
  Grouping grouping = Grouping::Macro2;
};

/// Orthonormal detector record states that define the branch structure, plus
/// the seed for deriving observer (arrow/cat) microstates.
struct RecordSet {
  StateVector cold;
  std::vector<StateVector> hot;
  std::uint64_t observer_seed = 0;
};

RecordSet records_for(const detectors::QubitDetector& det);
RecordSet records_for(const detectors::MoleculeDetector& det);
RecordSet records_for(const detectors::Bolometer& det);

/// Appends an arrow (dim 2) and a cat (dim 4) factor: cold components point
/// the arrow left and put the cat in a random state of the cat's L subspace,
/// hot configuration n points it right with a per-configuration cat state in
/// the orthogonal R subspace.
StateVector attach_observer_chain(const StateVector& joint, const RecordSet& records);

/// Replaces the watching-cat states with eyes-closed states (still distinct
/// per branch and orthogonal across the L/R groups); weights unchanged.
StateVector attach_closed_eyes(const StateVector& joint, const RecordSet& records);

/// Splits the global state into orthogonal branch components by detector
/// record. Branches with (numerically) zero weight are dropped, so an
/// unentangled state decomposes into a single branch.
BranchDecomposition decompose(const StateVector& joint, const RecordSet& records,
                              Grouping grouping);

/// Largest screen-density contribution from cross terms between different
/// branch components, measured on the same normalization as pattern_ignore.
double cross_branch_interference(const BranchDecomposition& d, const optics::PathField& field);

/// Born weight of the branches matching the query label.
double self_location_probability(const BranchDecomposition& d, const MacroLabel& query);

/// Seeded i.i.d. categorical sampling of branch labels; counts sum to trials.
std::map<std::string, std::uint64_t> sample_outcomes(const BranchDecomposition& d,
                                                     std::uint64_t trials, std::uint64_t seed);

nlohmann::json branch_table_json(const BranchDecomposition& d);
void write_branch_csv(std::ostream& out, const BranchDecomposition& d);
nlohmann::json counts_json(const std::map<std::string, std::uint64_t>& counts);

}  // namespace whichpath::branches
