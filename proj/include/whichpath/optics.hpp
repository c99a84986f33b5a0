// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "whichpath/hilbert.hpp"

#include <json.hpp>

namespace whichpath::optics {

using hilbert::cplx;
using hilbert::StateVector;

/// Two-slit geometry in dimensionless units: lengths in units of the initial
/// slit width, propagation distance in units of the Rayleigh-like length.
struct SlitGeometry {
  double separation = 8.0;  ///< slit-center distance
  double zeta = 3.0;        ///< propagation distance
};

/// Uniform screen sampling. Positions are x(i) = x_min + i * dx.
struct ScreenGrid {
  double x_min = -30.0;
  double x_max = 30.0;
  std::size_t n = 2049;

  double dx() const { return (x_max - x_min) / static_cast<double>(n - 1); }
  double x(std::size_t i) const { return x_min + static_cast<double>(i) * dx(); }

  friend bool operator==(const ScreenGrid&, const ScreenGrid&) = default;
};

/// Complex single-path wavefunctions sampled on the screen grid.
struct PathField {
  ScreenGrid grid;
  std::vector<cplx> psi_left;
  std::vector<cplx> psi_right;
};

/// Probability density on the screen. `baseline` holds the incoherent
/// (interference-free) part |cL psi_L|^2 + |cR psi_R|^2 under the same
/// normalization, so density - baseline is exactly the interference term.
struct ScreenPattern {
  ScreenGrid grid;
  std::vector<double> density;
  std::vector<double> baseline;
  std::string label;
};

/// Central window (half-width, units of the slit width) for visibility reads.
inline constexpr double kVisibilityWindow = 4.0;

/// Paraxially propagated Gaussian slit fields: each path is a complex
/// Gaussian of unit initial width centered at -/+ separation/2, with envelope
/// width sqrt(1 + zeta^2) and the quadratic curvature phase that produces the
/// mid-field fringes. Not normalized on the grid.
PathField gaussian_slit_field(const SlitGeometry& geom, const ScreenGrid& grid);

/// Per-path copies scaled so each intensity has unit grid integral; the
/// normalization every pattern operation works in.
struct UnitPaths {
  std::vector<cplx> left;
  std::vector<cplx> right;
};
UnitPaths unit_normalized_paths(const PathField& field);

/// Detector back-action: transverse momentum kick exp(i * kick * x) on the
/// right path.
void apply_backaction_kick(PathField& field, double kick);

/// |cL psi_L + cR psi_R|^2, grid-normalized to unit integral.
/// Requires |cL|^2 + |cR|^2 = 1 within 1e-9.
ScreenPattern pattern_pure(const PathField& field, cplx left, cplx right,
                           std::string label = "pure");

/// Screen density with the detector ignored:
/// rho_LL I_L + rho_RR I_R + 2 Re[rho_LR psi_L* psi_R], unit integral.
ScreenPattern pattern_ignore(const PathField& field, const StateVector& joint,
                             std::string label = "total");

/// Screen density correlated with a detector outcome (a state over any subset
/// of the non-atom factors; factors not in the outcome stay summed over).
/// Carries the outcome's Born weight, so a complete set of outcomes sums
/// pointwise to pattern_ignore.
ScreenPattern pattern_conditional(const PathField& field, const StateVector& joint,
                                  const StateVector& outcome, std::string label);

/// Fringe visibility (max-min)/(max+min) of the interference modulation over
/// |x| <= window: evaluated as the peak depth of density/baseline - 1, which
/// is the fringe contrast with the single-slit envelopes divided out. 1 for
/// full coherence, 0 for none.
double fringe_visibility(const ScreenPattern& pattern, double window = kVisibilityWindow);

/// Grid-independent coherence measure 2|rho_LR| / (rho_LL + rho_RR) from the
/// reduced atom-path matrix.
double coherence_visibility(const StateVector& joint);

/// CSV rows "x,density,label", 17 significant digits.
void write_csv(std::ostream& out, std::span<const ScreenPattern> patterns);

nlohmann::json to_json(const ScreenPattern& pattern);

}  // namespace whichpath::optics
