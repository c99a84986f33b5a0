// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace whichpath::hilbert {

using cplx = std::complex<double>;

/// Named subsystem of a tensor-product space.
struct FactorLabel {
  std::string name;
  std::size_t dim = 0;

  friend bool operator==(const FactorLabel& a, const FactorLabel& b) {
    return a.name == b.name && a.dim == b.dim;
  }
};

/// Dense complex amplitude vector over an ordered list of labeled factors.
/// The linear index is row-major with the first factor slowest: for factors
/// (f0, f1) the amplitude of basis state (i, j) sits at i * dim(f1) + j.
/// Subsystems are always addressed by label, never by position.
class StateVector {
public:
  StateVector() = default;
  StateVector(std::vector<FactorLabel> factors, std::vector<cplx> amps);

  /// Basis state |index⟩ of a single factor.
  static StateVector basis(FactorLabel factor, std::size_t index);

  /// Single-factor state with explicit amplitudes.
  static StateVector single(FactorLabel factor, std::vector<cplx> amps);

  const std::vector<FactorLabel>& factors() const { return factors_; }
  std::span<const cplx> amps() const { return amps_; }
  cplx& amp(std::size_t i) { return amps_[i]; }
  const cplx& amp(std::size_t i) const { return amps_[i]; }
  std::size_t dim() const { return amps_.size(); }

  bool has_factor(std::string_view name) const;
  /// Position of a factor in the ordered list; throws ConfigError if absent.
  std::size_t factor_position(std::string_view name) const;
  /// Row-major stride of the factor at the given position.
  std::size_t stride(std::size_t position) const;

  double norm() const;
  StateVector normalized() const;

  StateVector& operator+=(const StateVector& other);
  StateVector& operator-=(const StateVector& other);
  StateVector& operator*=(cplx scale);
  friend StateVector operator+(StateVector a, const StateVector& b) { return a += b; }
  friend StateVector operator-(StateVector a, const StateVector& b) { return a -= b; }
  friend StateVector operator*(cplx scale, StateVector s) { return s *= scale; }

private:
  std::vector<FactorLabel> factors_;
  std::vector<cplx> amps_;

  void check_same_shape(const StateVector& other) const;
};

/// Reduced (or full) density matrix over an ordered list of labeled factors.
class DensityMatrix {
public:
  DensityMatrix() = default;
  DensityMatrix(std::vector<FactorLabel> factors, std::vector<cplx> entries);

  const std::vector<FactorLabel>& factors() const { return factors_; }
  std::size_t dim() const { return dim_; }
  const cplx& operator()(std::size_t row, std::size_t col) const {
    return entries_[row * dim_ + col];
  }
  cplx& operator()(std::size_t row, std::size_t col) { return entries_[row * dim_ + col]; }

  cplx trace() const;
  double hermiticity_defect() const;

  /// Eigenvalues of the Hermitian part, ascending (cyclic Jacobi sweeps).
  std::vector<double> eigenvalues() const;

private:
  std::vector<FactorLabel> factors_;
  std::vector<cplx> entries_;
  std::size_t dim_ = 0;
};

/// Tensor product; factor lists are concatenated and must not share names.
StateVector tensor(const StateVector& a, const StateVector& b);

/// ⟨a|b⟩, conjugate-linear in `a`. Factor lists must match exactly.
cplx inner(const StateVector& a, const StateVector& b);

/// Partial trace keeping the named factors (in their original order).
DensityMatrix partial_trace(const StateVector& s, std::span<const std::string> keep);

/// ⟨outcome| ⊗ I applied to `joint`: contracts the outcome's factors away and
/// returns the (unnormalized) state over the remaining factors.
StateVector contract(const StateVector& joint, const StateVector& outcome);

/// (|outcome⟩⟨outcome| ⊗ I)|joint⟩, keeping the full factor list of `joint`.
StateVector project_onto(const StateVector& joint, const StateVector& outcome);

/// Inverse of contract: |outcome⟩ ⊗ |rest⟩ arranged on the given factor list,
/// which must be exactly the union of the two states' factors.
StateVector embed(const std::vector<FactorLabel>& full_factors, const StateVector& outcome,
                  const StateVector& rest);

/// Apply a dim×dim matrix (row-major) to one factor.
StateVector apply_to_factor(const StateVector& s, std::string_view factor,
                            std::span<const cplx> matrix);

/// Haar-random unit vector via normalized independent complex Gaussians.
/// Deterministic for a fixed seed.
StateVector random_unit_vector(std::size_t dim, std::uint64_t seed,
                               std::string_view factor_name = "rand");

/// Unit vectors (u, b) with ⟨u|b⟩ = overlap (real), built by orthogonalizing
/// a second random draw against u. overlap must lie in [0, 1].
std::pair<StateVector, StateVector> overlap_pair(std::size_t dim, double overlap,
                                                 std::uint64_t seed,
                                                 std::string_view factor_name = "rand");

}  // namespace whichpath::hilbert
