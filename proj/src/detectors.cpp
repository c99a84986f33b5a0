// SPDX-License-Identifier: Apache-2.0
#include "whichpath/detectors.hpp"

#include <cmath>
#include <numbers>

#include "whichpath/errors.hpp"
#include "whichpath/factors.hpp"
#include "whichpath/rng.hpp"

namespace whichpath::detectors {
namespace {

// Dense amplitude budget for a coupled state; anything larger has no business
// in this desk-scale simulator.
constexpr std::size_t kMaxAmps = 1u << 17;

void check_atom_input(const StateVector& atom) {
  if (atom.factors().size() != 1 || atom.factors()[0].name != factors::kAtomPath ||
      atom.factors()[0].dim != 2)
    throw ConfigError("coupling input must be a bare atom-path state of dimension 2");
  if (std::abs(atom.norm() - 1.0) > 1e-9)
    throw ConfigError("coupling input must be normalized");
}

std::size_t gas_dimension(const Bolometer& det) {
  std::size_t d = 1;
  for (std::size_t i = 0; i < det.n_molecules; ++i) {
    if (d > kMaxAmps / det.mol_dim)
      throw ResourceError(
          "bolometer register exceeds the dense amplitude budget; "
          "reduce n_molecules or mol_dim");
    d *= det.mol_dim;
  }
  return d;
}

std::size_t resolved_ext_dim(const Bolometer& det) {
  const std::size_t dim = det.ext_dim == 0 ? det.n_molecules + 1 : det.ext_dim;
  if (dim < det.n_molecules + 1)
    throw ConfigError("ext_dim must be at least n_molecules + 1 for distinct hot records");
  return dim;
}

}  // namespace

void validate(const QubitDetector& det) {
  if (det.efficiency < 0.0 || det.efficiency > 1.0)
    throw ConfigError("qubit efficiency must lie in [0, 1]");
  if (det.backaction_kick != 0.0 && det.efficiency != 1.0)
    throw ConfigError(
        "back-action with partial efficiency is not representable in the "
        "dim-2 path model; use efficiency 1 or kick 0");
}

void validate(const MoleculeDetector& det) {
  if (det.alpha < 0.0 || det.beta < 0.0)
    throw ConfigError("molecule amplitudes must be nonnegative");
  if (std::abs(det.alpha * det.alpha + det.beta * det.beta - 1.0) > 1e-9)
    throw ConfigError("molecule amplitudes must satisfy alpha^2 + beta^2 = 1");
  if (det.overlap_c < 0.0 || det.overlap_c > 1.0)
    throw ConfigError("molecule overlap dial must lie in [0, 1]");
  if (det.mol_dim < 2) throw ConfigError("molecule dimension must be at least 2");
}

void validate(const Bolometer& det) {
  if (det.n_molecules < 1) throw ConfigError("bolometer needs at least one molecule");
  if (!(det.p_hit > 0.0) || det.p_hit > 1.0)
    throw ConfigError("per-molecule hit probability must lie in (0, 1]");
  if (det.mol_dim < 2) throw ConfigError("molecule dimension must be at least 2");
  gas_dimension(det);
  resolved_ext_dim(det);
}

std::array<std::array<cplx, 2>, 2> ReadoutBasis::states() const {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  const cplx ph{std::cos(phi), std::sin(phi)};
  return {{{cplx{c, 0.0}, s * ph}, {-s * std::conj(ph), cplx{c, 0.0}}}};
}

std::string ReadoutBasis::outcome_label(std::size_t index) const {
  const double eps = 1e-12;
  if (std::abs(theta) < eps) return index == 0 ? "0" : "1";
  if (std::abs(theta - std::numbers::pi / 2.0) < eps && std::abs(phi) < eps)
    return index == 0 ? "+" : "-";
  return index == 0 ? "b0" : "b1";
}

MoleculeRecords molecule_records(const MoleculeDetector& det) {
  validate(det);
  auto [u, b] = hilbert::overlap_pair(det.mol_dim, det.overlap_c,
                                      rng::derive(det.seed, "mol", 1),
                                      factors::kMolecule);
  StateVector hot = b - hilbert::inner(u, b) * u;
  const double n = hot.norm();
  if (n > 1e-9) {
    hot *= cplx{1.0 / n, 0.0};
  } else {
    // overlap_c = 1: the bump records nothing; still expose a unit record
    // orthogonal to u so conditioning on it gives a zero pattern.
    for (std::uint64_t attempt = 0;; ++attempt) {
      StateVector t = hilbert::random_unit_vector(
          det.mol_dim, rng::derive(det.seed, "mol-hot-fallback", attempt), factors::kMolecule);
      t -= hilbert::inner(u, t) * u;
      const double tn = t.norm();
      if (tn > 1e-6) {
        hot = cplx{1.0 / tn, 0.0} * t;
        break;
      }
    }
  }
  return {std::move(u), std::move(b), std::move(hot)};
}

BolometerRecords bolometer_records(const Bolometer& det) {
  validate(det);
  const std::size_t n = det.n_molecules;

  std::vector<StateVector> cold_site;
  std::vector<StateVector> bumped_site;
  cold_site.reserve(n);
  bumped_site.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto [u, b] = hilbert::overlap_pair(det.mol_dim, 0.0, rng::derive(det.seed, "mol", i + 1),
                                        factors::molecule_site(i + 1));
    cold_site.push_back(std::move(u));
    bumped_site.push_back(std::move(b));
  }

  BolometerRecords rec;
  rec.cold = cold_site[0];
  for (std::size_t i = 1; i < n; ++i) rec.cold = hilbert::tensor(rec.cold, cold_site[i]);
  for (std::size_t hit = 0; hit < n; ++hit) {
    StateVector h = hit == 0 ? bumped_site[0] : cold_site[0];
    for (std::size_t i = 1; i < n; ++i)
      h = hilbert::tensor(h, i == hit ? bumped_site[i] : cold_site[i]);
    rec.hot.push_back(std::move(h));
  }

  rec.ext_dim = resolved_ext_dim(det);
  rec.env_cold = hilbert::random_unit_vector(rec.ext_dim, rng::derive(det.seed, "env-cold"),
                                             factors::kExternalEnv);
  const double kappa = det.ext_overlap_kappa;
  if (kappa < 0.0 || kappa > 1.0) throw ConfigError("ext_overlap_kappa must lie in [0, 1]");
  const double residual = std::sqrt(std::max(0.0, 1.0 - kappa * kappa));
  std::vector<StateVector> basis;  // Gram-Schmidt frame orthogonal to env_cold
  for (std::size_t hit = 0; hit < n; ++hit) {
    StateVector v = rec.env_cold;
    for (std::uint64_t attempt = 0;; ++attempt) {
      StateVector t = hilbert::random_unit_vector(
          rec.ext_dim, rng::derive(det.seed, "env-hot", hit * 97 + attempt),
          factors::kExternalEnv);
      t -= hilbert::inner(rec.env_cold, t) * rec.env_cold;
      for (const StateVector& prev : basis) t -= hilbert::inner(prev, t) * prev;
      const double tn = t.norm();
      if (tn > 1e-6) {
        v = cplx{1.0 / tn, 0.0} * t;
        break;
      }
    }
    basis.push_back(v);
    StateVector env = cplx{kappa, 0.0} * rec.env_cold;
    env += cplx{residual, 0.0} * v;
    rec.env_hot.push_back(std::move(env));
  }
  return rec;
}

StateVector couple_qubit(const StateVector& atom, const QubitDetector& det) {
  validate(det);
  check_atom_input(atom);

  const cplx amp_left = atom.amp(factors::kLeft);
  const cplx amp_right = atom.amp(factors::kRight);
  const double stay = std::sqrt(1.0 - det.efficiency);
  const double flip = std::sqrt(det.efficiency);

  std::vector<hilbert::FactorLabel> labels = atom.factors();
  labels.push_back({std::string(factors::kQubit), 2});
  std::vector<cplx> amps(4, cplx{0.0, 0.0});
  amps[0] = amp_left;          // L, qubit 0
  amps[2] = amp_right * stay;  // R, qubit 0
  amps[3] = amp_right * flip;  // R, qubit 1
  return StateVector(std::move(labels), std::move(amps));
}

BasisDecomposition rewrite_in_basis(const StateVector& joint, const ReadoutBasis& basis) {
  if (joint.factors().size() != 2 || !joint.has_factor(factors::kAtomPath) ||
      !joint.has_factor(factors::kQubit))
    throw ConfigError("rewrite_in_basis expects an atom-path x qubit state");

  const auto b = basis.states();
  const double ortho = std::abs(b[0][0] * std::conj(b[1][0]) + b[0][1] * std::conj(b[1][1]));
  if (ortho > 1e-12) throw ConfigError("readout basis is not orthonormal");

  BasisDecomposition out;
  for (std::size_t k = 0; k < 2; ++k) {
    const StateVector outcome = StateVector::single({std::string(factors::kQubit), 2},
                                                    {b[k][0], b[k][1]});
    const StateVector path = hilbert::contract(joint, outcome);
    out.outcomes[k] = {basis.outcome_label(k), path.amp(factors::kLeft),
                       path.amp(factors::kRight),
                       std::norm(path.amp(0)) + std::norm(path.amp(1))};
  }
  return out;
}

StateVector couple_molecule(const StateVector& atom, const MoleculeDetector& det) {
  check_atom_input(atom);
  const MoleculeRecords rec = molecule_records(det);

  StateVector right_mol = cplx{det.alpha, 0.0} * rec.bumped;
  right_mol += cplx{det.beta, 0.0} * rec.cold;

  StateVector out = hilbert::tensor(factors::atom_state(atom.amp(0), cplx{0.0, 0.0}), rec.cold);
  out += hilbert::tensor(factors::atom_state(cplx{0.0, 0.0}, atom.amp(1)), right_mol);

  const double n = out.norm();
  if (std::abs(n - 1.0) > 1e-12) out *= cplx{1.0 / n, 0.0};
  return out;
}

StateVector couple_bolometer(const StateVector& atom, const Bolometer& det) {
  check_atom_input(atom);
  const std::size_t gas_dim = gas_dimension(det);
  if (2 * gas_dim > kMaxAmps)
    throw ResourceError(
        "bolometer register exceeds the dense amplitude budget; "
        "reduce n_molecules or mol_dim");
  const BolometerRecords rec = bolometer_records(det);

  // Right-path gas state: geometric first-hit ladder plus the all-miss term.
  const double q = 1.0 - det.p_hit;
  StateVector right_gas = cplx{std::pow(q, 0.5 * static_cast<double>(det.n_molecules)), 0.0} *
                          rec.cold;
  for (std::size_t hit = 0; hit < det.n_molecules; ++hit) {
    const double amp = std::sqrt(det.p_hit * std::pow(q, static_cast<double>(hit)));
    right_gas += cplx{amp, 0.0} * rec.hot[hit];
  }

  StateVector out = hilbert::tensor(factors::atom_state(atom.amp(0), cplx{0.0, 0.0}), rec.cold);
  out += hilbert::tensor(factors::atom_state(cplx{0.0, 0.0}, atom.amp(1)), right_gas);
  return out;
}

StateVector attach_external_environment(const StateVector& joint, const Bolometer& det) {
  const BolometerRecords rec = bolometer_records(det);
  for (std::size_t i = 1; i <= det.n_molecules; ++i)
    if (!joint.has_factor(factors::molecule_site(i)))
      throw ConfigError("joint state is missing bolometer factor '" +
                        factors::molecule_site(i) + "'");
  if (joint.has_factor(factors::kExternalEnv))
    throw ConfigError("external environment already attached");
  if (joint.dim() * rec.ext_dim > kMaxAmps)
    throw ResourceError("attaching the environment exceeds the dense amplitude budget");

  const StateVector cold_comp = hilbert::project_onto(joint, rec.cold);
  StateVector out = hilbert::tensor(cold_comp, rec.env_cold);
  double captured = std::pow(cold_comp.norm(), 2);
  for (std::size_t hit = 0; hit < det.n_molecules; ++hit) {
    const StateVector comp = hilbert::project_onto(joint, rec.hot[hit]);
    captured += std::pow(comp.norm(), 2);
    out += hilbert::tensor(comp, rec.env_hot[hit]);
  }
  if (std::abs(captured - std::pow(joint.norm(), 2)) > 1e-9)
    throw ConfigError("joint state does not have bolometer cold/hot structure");
  return out;
}

double detector_efficiency(const MoleculeDetector& det) {
  validate(det);
  return det.alpha * det.alpha;
}

double detector_efficiency(const Bolometer& det) {
  validate(det);
  return 1.0 - std::pow(1.0 - det.p_hit, static_cast<double>(det.n_molecules));
}

}  // namespace whichpath::detectors
