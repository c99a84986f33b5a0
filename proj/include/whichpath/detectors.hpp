// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "whichpath/hilbert.hpp"

namespace whichpath::detectors {

using hilbert::cplx;
using hilbert::StateVector;

/// Qubit coupled to the right arm: |L⟩|0⟩ -> |L⟩|0⟩ and
/// |R⟩|0⟩ -> sqrt(1-e)|R⟩|0⟩ + sqrt(e)|R⟩|1⟩.
/// The back-action kick is consumed by the optics field (phase on psi_right);
/// with partial efficiency a nonzero kick is rejected, because kicked and
/// unkicked right paths cannot share one dim-2 path factor.
struct QubitDetector {
  double backaction_kick = 0.0;
  double efficiency = 1.0;
};

/// Readout basis {b0, b1} on the Bloch sphere. theta=0 is the computational
/// basis; theta=pi/2, phi=0 is the +/- basis.
struct ReadoutBasis {
  double theta = 0.0;
  double phi = 0.0;

  /// Orthonormal basis vectors as amplitude pairs (component on |0⟩, |1⟩).
  std::array<std::array<cplx, 2>, 2> states() const;
  /// "0"/"1", "+"/"-", or "b0"/"b1" depending on the angles.
  std::string outcome_label(std::size_t index) const;
};

/// Single gas molecule in the right arm: |R⟩|u⟩ -> alpha|R⟩|b⟩ + beta|R⟩|u⟩,
/// with (u, b) a seeded random pair of unit vectors with ⟨u|b⟩ = overlap_c.
struct MoleculeDetector {
  double alpha = 0.0;
  double beta = 1.0;
  double overlap_c = 0.0;
  std::size_t mol_dim = 4;
  std::uint64_t seed = 0;
};

/// Gas volume of n molecules, single-scattering model: a right-path atom
/// first hits molecule n with amplitude sqrt(p (1-p)^(n-1)), leaving that
/// molecule bumped and the rest cold; it misses everything with amplitude
/// sqrt((1-p)^n_molecules).
struct Bolometer {
  std::size_t n_molecules = 8;
  double p_hit = 0.3;
  std::size_t mol_dim = 2;
  std::size_t ext_dim = 0;  ///< 0 = auto (n_molecules + 1)
  double ext_overlap_kappa = 0.0;
  std::uint64_t seed = 0;
};

/// Deterministic record states of the single molecule (functions of the seed).
struct MoleculeRecords {
  StateVector cold;        ///< |u⟩
  StateVector bumped;      ///< |b⟩ with ⟨u|b⟩ = overlap_c
  StateVector hot_record;  ///< unit vector along b's component orthogonal to u
};

/// Deterministic record states of the bolometer and its external environment.
struct BolometerRecords {
  StateVector cold;               ///< |C⟩ = all molecules cold
  std::vector<StateVector> hot;   ///< |H_n⟩ = molecule n bumped (1-based in labels)
  StateVector env_cold;           ///< external state tied to the cold line
  std::vector<StateVector> env_hot;  ///< ⟨env_cold|env_hot[n]⟩ = kappa
  std::size_t ext_dim = 0;        ///< resolved external dimension
};

void validate(const QubitDetector& det);
void validate(const MoleculeDetector& det);
void validate(const Bolometer& det);

MoleculeRecords molecule_records(const MoleculeDetector& det);
BolometerRecords bolometer_records(const Bolometer& det);

/// Appends a qubit factor; isometry on the reachable subspace.
StateVector couple_qubit(const StateVector& atom, const QubitDetector& det);

/// Effective path amplitudes conditioned on each readout-basis outcome.
struct BasisDecomposition {
  struct Outcome {
    std::string label;
    cplx left;
    cplx right;
    double weight;  ///< |left|^2 + |right|^2
  };
  std::array<Outcome, 2> outcomes;
};
BasisDecomposition rewrite_in_basis(const StateVector& joint, const ReadoutBasis& basis);

/// Appends the molecule factor. For overlap_c > 0 the literal coupling map is
/// not an isometry (the target states overlap), so the output is renormalized;
/// at overlap_c = 0 amplitudes pass through untouched.
StateVector couple_molecule(const StateVector& atom, const MoleculeDetector& det);

/// Appends one factor per molecule. Exact isometry.
StateVector couple_bolometer(const StateVector& atom, const Bolometer& det);

/// Appends the external-environment factor: the cold line (including the
/// all-miss right-path term) carries env_cold, each hot configuration n
/// carries env_hot[n]. Norm preserved.
StateVector attach_external_environment(const StateVector& joint, const Bolometer& det);

/// alpha^2 for the molecule; 1 - (1-p)^n for the bolometer.
double detector_efficiency(const MoleculeDetector& det);
double detector_efficiency(const Bolometer& det);

}  // namespace whichpath::detectors
