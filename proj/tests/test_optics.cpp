// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "whichpath/detectors.hpp"
#include "whichpath/errors.hpp"
#include "whichpath/factors.hpp"
#include "whichpath/optics.hpp"
#include "whichpath/rng.hpp"

using namespace whichpath;
using hilbert::cplx;
using hilbert::StateVector;
using optics::PathField;
using optics::ScreenGrid;
using optics::ScreenPattern;
using optics::SlitGeometry;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

PathField default_field() { return optics::gaussian_slit_field({}, {}); }

std::size_t center_index(const ScreenGrid& grid) { return (grid.n - 1) / 2; }

StateVector balanced_atom() { return factors::atom_state({kInvSqrt2, 0}, {kInvSqrt2, 0}); }

// (|L 0> + |R 1>)/sqrt(2): the perfectly efficient which-path register.
StateVector which_path_state() {
  return detectors::couple_qubit(balanced_atom(), {0.0, 1.0});
}

// Explicit three-term state (|L>|u> + alpha|R>|b> + beta|R>|u>)/sqrt(2),
// normalized; the independent construction the molecule coupling must match.
StateVector three_term_state(double alpha, double beta, double overlap_c, std::size_t mol_dim,
                             std::uint64_t seed) {
  auto [u, b] =
      hilbert::overlap_pair(mol_dim, overlap_c, rng::derive(seed, "mol", 1), factors::kMolecule);
  StateVector s = hilbert::tensor(factors::atom_state({kInvSqrt2, 0}, {0, 0}), u);
  s += cplx{alpha * kInvSqrt2, 0} * hilbert::tensor(factors::atom_state({0, 0}, {1, 0}), b);
  s += cplx{beta * kInvSqrt2, 0} * hilbert::tensor(factors::atom_state({0, 0}, {1, 0}), u);
  return s.normalized();
}

}  // namespace

TEST_CASE("unpropagated slit field is a pair of unit-width Gaussians") {
  const SlitGeometry geom{8.0, 0.0};
  const ScreenGrid grid{};
  const PathField field = optics::gaussian_slit_field(geom, grid);
  for (std::size_t i = 0; i < grid.n; i += 37) {
    const double x = grid.x(i);
    const double left = std::exp(-(x + 4.0) * (x + 4.0));
    CHECK(std::abs(std::norm(field.psi_left[i]) - left) < 1e-12);
  }
}

TEST_CASE("slit fields mirror each other without back-action") {
  const PathField field = default_field();
  for (std::size_t i = 0; i < field.grid.n; ++i) {
    const std::size_t mirror = field.grid.n - 1 - i;
    CHECK(std::abs(field.psi_right[i] - field.psi_left[mirror]) < 1e-12);
  }
}

TEST_CASE("propagated envelope width read off the grid matches the spreading law") {
  // width(zeta) = sqrt(1 + zeta^2); at zeta = 3 the envelope second moment
  // about the slit center must give sqrt(10).
  const PathField field = default_field();
  const double dx = field.grid.dx();
  double mass = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < field.grid.n; ++i) {
    const double u = field.grid.x(i) + 4.0;
    const double w = std::norm(field.psi_left[i]) * dx;
    mass += w;
    m2 += u * u * w;
  }
  const double width = std::sqrt(2.0 * m2 / mass);
  CHECK(std::abs(width - std::sqrt(10.0)) < 1e-6);
}

TEST_CASE("pure pattern equals its three-term expansion pointwise") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    rng::Stream stream(seed);
    const SlitGeometry geom{4.0 + 8.0 * stream.uniform(), 1.0 + 4.0 * stream.uniform()};
    const PathField field = optics::gaussian_slit_field(geom, {});
    const StateVector amp = hilbert::random_unit_vector(2, rng::derive(seed, "amps"));
    const cplx left = amp.amp(0);
    const cplx right = amp.amp(1);

    const ScreenPattern p = optics::pattern_pure(field, left, right);
    const auto paths = optics::unit_normalized_paths(field);
    const double dx = field.grid.dx();

    double z = 0.0;
    std::vector<double> expanded(field.grid.n);
    for (std::size_t i = 0; i < field.grid.n; ++i) {
      const double single = std::norm(left) * std::norm(paths.left[i]) +
                            std::norm(right) * std::norm(paths.right[i]);
      const double cross =
          2.0 * (left * std::conj(right) * paths.left[i] * std::conj(paths.right[i])).real();
      expanded[i] = single + cross;
      z += expanded[i] * dx;
    }
    for (std::size_t i = 0; i < field.grid.n; ++i)
      CHECK(std::abs(p.density[i] - expanded[i] / z) < 1e-12);
  }
}

TEST_CASE("balanced pure pattern is symmetric with the central fringe on axis") {
  const PathField field = default_field();
  const ScreenPattern p = optics::pattern_pure(field, {kInvSqrt2, 0}, {kInvSqrt2, 0});

  for (std::size_t i = 0; i < p.density.size(); ++i)
    CHECK(std::abs(p.density[i] - p.density[p.density.size() - 1 - i]) < 1e-12);

  // constructive on axis: x = 0 dominates its own fringe period
  const double fringe_period = 2.0 * std::numbers::pi * 10.0 / (3.0 * 8.0);
  const std::size_t c = center_index(p.grid);
  for (std::size_t i = 0; i < p.density.size(); ++i) {
    if (std::abs(p.grid.x(i)) <= 0.5 * fringe_period)
      CHECK(p.density[c] >= p.density[i] - 1e-15);
  }

  const double integral =
      std::accumulate(p.density.begin(), p.density.end(), 0.0) * p.grid.dx();
  CHECK(std::abs(integral - 1.0) < 1e-12);
}

TEST_CASE("one-path pattern is the bare single-slit envelope") {
  const PathField field = default_field();
  const ScreenPattern p = optics::pattern_pure(field, {1, 0}, {0, 0});
  const auto paths = optics::unit_normalized_paths(field);
  for (std::size_t i = 0; i < p.density.size(); ++i) {
    CHECK(std::abs(p.density[i] - std::norm(paths.left[i])) < 1e-12);
    CHECK(std::abs(p.density[i] - p.baseline[i]) < 1e-15);
  }
}

TEST_CASE("antisymmetric combination has an exact null on axis") {
  const PathField field = default_field();
  const ScreenPattern p = optics::pattern_pure(field, {kInvSqrt2, 0}, {-kInvSqrt2, 0});
  CHECK(p.density[center_index(p.grid)] < 1e-20);
}

TEST_CASE("pattern_pure rejects non-normalized amplitudes") {
  const PathField field = default_field();
  CHECK_THROWS_AS(optics::pattern_pure(field, {0.9, 0}, {0.9, 0}), ConfigError);
}

TEST_CASE("conditioning the which-path state on the computational basis kills fringes") {
  const PathField field = default_field();
  const StateVector joint = which_path_state();
  const auto paths = optics::unit_normalized_paths(field);

  const ScreenPattern p0 = optics::pattern_conditional(
      field, joint, StateVector::basis({std::string(factors::kQubit), 2}, 0), "cond:0");
  for (std::size_t i = 0; i < p0.density.size(); ++i) {
    CHECK(std::abs(p0.density[i] - 0.5 * std::norm(paths.left[i])) < 1e-12);
    CHECK(std::abs(p0.density[i] - p0.baseline[i]) < 1e-15);  // no interference term
  }

  const ScreenPattern p1 = optics::pattern_conditional(
      field, joint, StateVector::basis({std::string(factors::kQubit), 2}, 1), "cond:1");
  for (std::size_t i = 0; i < p1.density.size(); ++i)
    CHECK(std::abs(p1.density[i] - 0.5 * std::norm(paths.right[i])) < 1e-12);
}

TEST_CASE("conditioning on the +/- basis restores full-contrast fringes") {
  const PathField field = default_field();
  const StateVector joint = which_path_state();
  const StateVector plus = StateVector::single({std::string(factors::kQubit), 2},
                                               {cplx{kInvSqrt2, 0}, cplx{kInvSqrt2, 0}});
  const StateVector minus = StateVector::single({std::string(factors::kQubit), 2},
                                                {cplx{kInvSqrt2, 0}, cplx{-kInvSqrt2, 0}});

  const ScreenPattern pp = optics::pattern_conditional(field, joint, plus, "cond:+");
  const ScreenPattern pm = optics::pattern_conditional(field, joint, minus, "cond:-");
  CHECK(optics::fringe_visibility(pp) >= 1.0 - 1e-9);
  CHECK(optics::fringe_visibility(pm) >= 1.0 - 1e-9);
  CHECK(optics::fringe_visibility(pp) <= 1.0 + 1e-12);

  // the two eraser patterns rebuild the two which-path patterns pointwise
  const ScreenPattern p0 = optics::pattern_conditional(
      field, joint, StateVector::basis({std::string(factors::kQubit), 2}, 0), "cond:0");
  const ScreenPattern p1 = optics::pattern_conditional(
      field, joint, StateVector::basis({std::string(factors::kQubit), 2}, 1), "cond:1");
  for (std::size_t i = 0; i < pp.density.size(); ++i)
    CHECK(std::abs(pp.density[i] + pm.density[i] - p0.density[i] - p1.density[i]) < 1e-9);
}

TEST_CASE("outcome orthogonal to every detector component gives a zero pattern") {
  const detectors::MoleculeDetector det{std::sqrt(0.1), std::sqrt(0.9), 0.0, 4, 7};
  const PathField field = default_field();
  const StateVector joint = detectors::couple_molecule(balanced_atom(), det);
  const auto rec = detectors::molecule_records(det);

  StateVector stray = hilbert::random_unit_vector(4, 12345, factors::kMolecule);
  stray -= hilbert::inner(rec.cold, stray) * rec.cold;
  stray -= hilbert::inner(rec.bumped, stray) * rec.bumped;
  stray = stray.normalized();

  const ScreenPattern p = optics::pattern_conditional(field, joint, stray, "cond:stray");
  for (double v : p.density) CHECK(std::abs(v) < 1e-20);
}

TEST_CASE("ignored pattern of a product state matches the pure pattern") {
  const PathField field = default_field();
  const StateVector product =
      hilbert::tensor(balanced_atom(), StateVector::basis({std::string(factors::kQubit), 2}, 0));
  const ScreenPattern ignored = optics::pattern_ignore(field, product);
  const ScreenPattern pure = optics::pattern_pure(field, {kInvSqrt2, 0}, {kInvSqrt2, 0});
  for (std::size_t i = 0; i < ignored.density.size(); ++i)
    CHECK(std::abs(ignored.density[i] - pure.density[i]) < 1e-12);
}

TEST_CASE("ignoring an orthogonal which-path record removes interference exactly") {
  const PathField field = default_field();
  const ScreenPattern p = optics::pattern_ignore(field, which_path_state());
  const auto paths = optics::unit_normalized_paths(field);
  for (std::size_t i = 0; i < p.density.size(); ++i) {
    CHECK(std::abs(p.density[i] - p.baseline[i]) < 1e-15);
    const double mixture =
        0.5 * (std::norm(paths.left[i]) + std::norm(paths.right[i]));
    CHECK(std::abs(p.density[i] - mixture) < 1e-12);
  }
}

TEST_CASE("complete outcome sets sum to the ignored pattern pointwise") {
  const PathField field = default_field();
  const StateVector joint = which_path_state();
  const ScreenPattern total = optics::pattern_ignore(field, joint);

  const detectors::ReadoutBasis computational{0.0, 0.0};
  const detectors::ReadoutBasis hadamard{std::numbers::pi / 2.0, 0.0};
  for (const auto& basis : {computational, hadamard}) {
    const auto states = basis.states();
    std::vector<double> sum(field.grid.n, 0.0);
    for (std::size_t k = 0; k < 2; ++k) {
      const StateVector outcome = StateVector::single({std::string(factors::kQubit), 2},
                                                      {states[k][0], states[k][1]});
      const ScreenPattern p = optics::pattern_conditional(field, joint, outcome, "cond");
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += p.density[i];
    }
    for (std::size_t i = 0; i < sum.size(); ++i)
      CHECK(std::abs(sum[i] - total.density[i]) < 1e-9);
  }
}

TEST_CASE("ignored pattern cannot reveal the remote readout basis") {
  const PathField field = default_field();
  const StateVector joint = which_path_state();
  const ScreenPattern before = optics::pattern_ignore(field, joint);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto u = oracles::random_unitary(2, seed);
    const StateVector rotated = hilbert::apply_to_factor(joint, factors::kQubit, u);
    const ScreenPattern after = optics::pattern_ignore(field, rotated);
    for (std::size_t i = 0; i < before.density.size(); ++i)
      CHECK(std::abs(before.density[i] - after.density[i]) < 1e-12);
  }

  // same invariance with the larger molecule register
  const detectors::MoleculeDetector det{std::sqrt(0.1), std::sqrt(0.9), 0.0, 4, 7};
  const StateVector mol_joint = detectors::couple_molecule(balanced_atom(), det);
  const ScreenPattern mol_before = optics::pattern_ignore(field, mol_joint);
  const auto u4 = oracles::random_unitary(4, 99);
  const ScreenPattern mol_after =
      optics::pattern_ignore(field, hilbert::apply_to_factor(mol_joint, factors::kMolecule, u4));
  for (std::size_t i = 0; i < mol_before.density.size(); ++i)
    CHECK(std::abs(mol_before.density[i] - mol_after.density[i]) < 1e-12);
}

TEST_CASE("fringe visibility: full coherence, none, and complementary mixtures") {
  const PathField field = default_field();

  const ScreenPattern coherent = optics::pattern_pure(field, {kInvSqrt2, 0}, {kInvSqrt2, 0});
  CHECK(optics::fringe_visibility(coherent) >= 1.0 - 1e-6);

  const ScreenPattern ignored = optics::pattern_ignore(field, which_path_state());
  CHECK(optics::fringe_visibility(ignored) <= 1e-6);

  // 50/50 mixture of fringes and anti-fringes: the eraser outcomes summed
  const StateVector joint = which_path_state();
  const StateVector plus = StateVector::single({std::string(factors::kQubit), 2},
                                               {cplx{kInvSqrt2, 0}, cplx{kInvSqrt2, 0}});
  const StateVector minus = StateVector::single({std::string(factors::kQubit), 2},
                                                {cplx{kInvSqrt2, 0}, cplx{-kInvSqrt2, 0}});
  ScreenPattern mix = optics::pattern_conditional(field, joint, plus, "mix");
  const ScreenPattern anti = optics::pattern_conditional(field, joint, minus, "anti");
  for (std::size_t i = 0; i < mix.density.size(); ++i) {
    mix.density[i] += anti.density[i];
    mix.baseline[i] += anti.baseline[i];
  }
  CHECK(optics::fringe_visibility(mix) <= 1e-6);
}

TEST_CASE("fringe visibility needs at least two grid points in the window") {
  const PathField field = default_field();
  const ScreenPattern p = optics::pattern_pure(field, {kInvSqrt2, 0}, {kInvSqrt2, 0});
  CHECK_THROWS_AS(optics::fringe_visibility(p, 1e-3), ConfigError);
}

TEST_CASE("coherence visibility: pure, which-path, and the overlap dial") {
  CHECK(std::abs(optics::coherence_visibility(balanced_atom()) - 1.0) < 1e-12);
  CHECK(optics::coherence_visibility(which_path_state()) < 1e-12);

  // Overlap dial on the explicit three-term state. Oracle: brute-force
  // reduced matrix; for the normalized state this evaluates to
  // (beta + alpha c) / (1 + alpha beta c).
  const double alpha = std::sqrt(0.1);
  const double beta = std::sqrt(0.9);
  for (double c : {0.0, 0.5, 1.0}) {
    const StateVector explicit_state = three_term_state(alpha, beta, c, 4, 7);
    const double oracle = oracles::brute_force_visibility(explicit_state, 0);
    const double closed_form = (beta + alpha * c) / (1.0 + alpha * beta * c);
    CHECK(std::abs(oracle - closed_form) < 1e-12);

    const detectors::MoleculeDetector det{alpha, beta, c, 4, 7};
    const StateVector coupled = detectors::couple_molecule(balanced_atom(), det);
    CHECK(std::abs(optics::coherence_visibility(coupled) - oracle) < 1e-12);
  }

  // the acceptance case c = 0 lands on beta itself
  const detectors::MoleculeDetector det{alpha, beta, 0.0, 4, 7};
  const StateVector coupled = detectors::couple_molecule(balanced_atom(), det);
  CHECK(std::abs(optics::coherence_visibility(coupled) - beta) < 1e-9);
}

TEST_CASE("coherence visibility is nondecreasing in the overlap dial") {
  const double alpha = std::sqrt(0.1);
  const double beta = std::sqrt(0.9);
  double previous = -1.0;
  for (int i = 0; i <= 10; ++i) {
    const detectors::MoleculeDetector det{alpha, beta, i / 10.0, 4, 7};
    const double v = optics::coherence_visibility(detectors::couple_molecule(balanced_atom(), det));
    CHECK(v >= previous - 1e-12);
    previous = v;
  }
}

TEST_CASE("fringe and coherence visibility agree for balanced kick-free states") {
  const PathField field = default_field();

  const StateVector pure = balanced_atom();
  CHECK(std::abs(optics::fringe_visibility(optics::pattern_ignore(field, pure)) -
                 optics::coherence_visibility(pure)) < 1e-3);

  const StateVector which_path = which_path_state();
  CHECK(std::abs(optics::fringe_visibility(optics::pattern_ignore(field, which_path)) -
                 optics::coherence_visibility(which_path)) < 1e-3);

  const detectors::MoleculeDetector det{std::sqrt(0.1), std::sqrt(0.9), 0.0, 4, 7};
  const StateVector mol = detectors::couple_molecule(balanced_atom(), det);
  CHECK(std::abs(optics::fringe_visibility(optics::pattern_ignore(field, mol)) -
                 optics::coherence_visibility(mol)) < 1e-3);
}

TEST_CASE("back-action kick rescales fringes without touching envelopes") {
  PathField plain = default_field();
  PathField field = default_field();
  optics::apply_backaction_kick(field, 0.8);
  for (std::size_t i = 0; i < field.grid.n; ++i)
    CHECK(std::abs(std::norm(field.psi_right[i]) - std::norm(plain.psi_right[i])) < 1e-15);

  // the linear kick phase changes the fringe frequency, so the pattern moves
  // while the state stays fully coherent
  const ScreenPattern kicked = optics::pattern_pure(field, {kInvSqrt2, 0}, {kInvSqrt2, 0});
  const ScreenPattern unkicked = optics::pattern_pure(plain, {kInvSqrt2, 0}, {kInvSqrt2, 0});
  double diff = 0.0;
  for (std::size_t i = 0; i < kicked.density.size(); ++i)
    diff = std::max(diff, std::abs(kicked.density[i] - unkicked.density[i]));
  CHECK(diff > 1e-3);
  CHECK(optics::fringe_visibility(kicked) >= 1.0 - 1e-9);
}

TEST_CASE("patterns round-trip through CSV at full precision") {
  const PathField field = default_field();
  const std::vector<ScreenPattern> patterns = {
      optics::pattern_pure(field, {kInvSqrt2, 0}, {kInvSqrt2, 0}, "total"),
      optics::pattern_ignore(field, which_path_state(), "ignored")};

  std::ostringstream out;
  optics::write_csv(out, patterns);
  std::istringstream in(out.str());

  std::string line;
  std::getline(in, line);
  CHECK(line == "x,density,label");
  for (const ScreenPattern& p : patterns) {
    for (std::size_t i = 0; i < p.density.size(); ++i) {
      REQUIRE(std::getline(in, line));
      const auto comma1 = line.find(',');
      const auto comma2 = line.find(',', comma1 + 1);
      CHECK(std::stod(line.substr(0, comma1)) == p.grid.x(i));
      CHECK(std::stod(line.substr(comma1 + 1, comma2 - comma1 - 1)) == p.density[i]);
      CHECK(line.substr(comma2 + 1) == p.label);
    }
  }

  const nlohmann::json j = optics::to_json(patterns[0]);
  CHECK(j["label"] == "total");
  CHECK(j["x"].size() == patterns[0].density.size());
}
