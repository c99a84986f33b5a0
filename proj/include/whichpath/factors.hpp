// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "whichpath/hilbert.hpp"

// Factor-name conventions shared by the coupling, pattern, and branching code.
namespace whichpath::factors {

inline constexpr std::string_view kAtomPath = "atom-path";  // dim 2: 0 = left, 1 = right
inline constexpr std::string_view kQubit = "qubit";
inline constexpr std::string_view kMolecule = "mol";        // single-molecule detector
inline constexpr std::string_view kMoleculePrefix = "mol-"; // bolometer sites: mol-1..mol-N
inline constexpr std::string_view kExternalEnv = "env-ext";
inline constexpr std::string_view kArrow = "arrow";         // dim 2: 0 = left, 1 = right
inline constexpr std::string_view kCat = "cat";

inline constexpr std::size_t kLeft = 0;
inline constexpr std::size_t kRight = 1;

/// Interferometer path state amp_left|L⟩ + amp_right|R⟩ over the atom-path factor.
inline hilbert::StateVector atom_state(hilbert::cplx amp_left, hilbert::cplx amp_right) {
  return hilbert::StateVector::single({std::string(kAtomPath), 2}, {amp_left, amp_right});
}

inline std::string molecule_site(std::size_t index_1based) {
  return std::string(kMoleculePrefix) + std::to_string(index_1based);
}

}  // namespace whichpath::factors
