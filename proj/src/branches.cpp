// SPDX-License-Identifier: Apache-2.0
#include "whichpath/branches.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "whichpath/errors.hpp"
#include "whichpath/factors.hpp"
#include "whichpath/rng.hpp"

namespace whichpath::branches {

using hilbert::cplx;

namespace {

constexpr double kWeightFloor = 1e-24;  // drops numerical ghosts, keeps physical tails
constexpr std::size_t kCatDim = 4;      // L subspace {0,1}, R subspace {2,3}

StateVector arrow_state(std::size_t side) {
  return StateVector::basis({std::string(factors::kArrow), 2}, side);
}

// Per-branch cat microstate: Haar-random within the side's 2-dim subspace.
// config_index 0 is the cold line; hot configuration n uses index n.
StateVector cat_state(std::uint64_t observer_seed, bool right, bool closed,
                      std::size_t config_index) {
  const char* purpose = closed ? (right ? "cat-closed-R" : "cat-closed-L")
                               : (right ? "cat-saw-R" : "cat-saw-L");
  const StateVector sub = hilbert::random_unit_vector(
      2, rng::derive(observer_seed, purpose, config_index), "cat-sub");
  std::vector<cplx> amps(kCatDim, cplx{0.0, 0.0});
  const std::size_t offset = right ? 2 : 0;
  amps[offset] = sub.amp(0);
  amps[offset + 1] = sub.amp(1);
  return StateVector::single({std::string(factors::kCat), kCatDim}, std::move(amps));
}

std::string cat_mode_name(bool right, bool closed) {
  if (closed) return right ? "closedR" : "closedL";
  return right ? "sawR" : "sawL";
}

void check_records_present(const StateVector& joint, const RecordSet& records) {
  for (const auto& f : records.cold.factors()) {
    if (!joint.has_factor(f.name))
      throw ConfigError("joint state is missing detector factor '" + f.name + "'");
  }
}

double weight_of(const StateVector& component) {
  const double n = component.norm();
  return n * n;
}

}  // namespace

std::string to_string(const MacroLabel& label) {
  std::string out;
  if (label.detector) {
    out += *label.detector == DetectorSide::Cold ? "C" : "H";
    if (label.hot_config) out += ":" + std::to_string(*label.hot_config);
  }
  if (label.arrow) {
    if (!out.empty()) out += "|";
    out += "arrow-";
    out += *label.arrow;
  }
  if (label.cat) {
    if (!out.empty()) out += "|";
    out += "cat-" + *label.cat;
  }
  return out.empty() ? "all" : out;
}

bool matches(const MacroLabel& label, const MacroLabel& query) {
  if (query.detector && (!label.detector || *label.detector != *query.detector)) return false;
  if (query.hot_config && (!label.hot_config || *label.hot_config != *query.hot_config))
    return false;
  if (query.arrow && (!label.arrow || *label.arrow != *query.arrow)) return false;
  if (query.cat && (!label.cat || *label.cat != *query.cat)) return false;
  return true;
}

RecordSet records_for(const detectors::QubitDetector& det) {
  detectors::validate(det);
  RecordSet rec;
  rec.cold = StateVector::basis({std::string(factors::kQubit), 2}, 0);
  rec.hot.push_back(StateVector::basis({std::string(factors::kQubit), 2}, 1));
  rec.observer_seed = rng::derive(0, "qubit-observer");
  return rec;
}

RecordSet records_for(const detectors::MoleculeDetector& det) {
  const detectors::MoleculeRecords mol = detectors::molecule_records(det);
  RecordSet rec;
  rec.cold = mol.cold;
  rec.hot.push_back(mol.hot_record);
  rec.observer_seed = rng::derive(det.seed, "observer");
  return rec;
}

RecordSet records_for(const detectors::Bolometer& det) {
  const detectors::BolometerRecords bol = detectors::bolometer_records(det);
  RecordSet rec;
  rec.cold = bol.cold;
  rec.hot = bol.hot;
  rec.observer_seed = rng::derive(det.seed, "observer");
  return rec;
}

StateVector attach_observer_chain(const StateVector& joint, const RecordSet& records) {
  check_records_present(joint, records);
  if (joint.has_factor(factors::kArrow) || joint.has_factor(factors::kCat))
    throw ConfigError("observer chain already attached");

  const StateVector cold_comp = hilbert::project_onto(joint, records.cold);
  double captured = weight_of(cold_comp);
  StateVector out = hilbert::tensor(
      hilbert::tensor(cold_comp, arrow_state(factors::kLeft)),
      cat_state(records.observer_seed, /*right=*/false, /*closed=*/false, 0));

  for (std::size_t n = 0; n < records.hot.size(); ++n) {
    const StateVector comp = hilbert::project_onto(joint, records.hot[n]);
    captured += weight_of(comp);
    out += hilbert::tensor(
        hilbert::tensor(comp, arrow_state(factors::kRight)),
        cat_state(records.observer_seed, /*right=*/true, /*closed=*/false, n + 1));
  }

  if (std::abs(captured - weight_of(joint)) > 1e-9)
    throw ConfigError("joint state does not decompose into the detector records");
  return out;
}

StateVector attach_closed_eyes(const StateVector& joint, const RecordSet& records) {
  if (!joint.has_factor(factors::kArrow) || !joint.has_factor(factors::kCat))
    throw ConfigError("attach_closed_eyes requires an attached observer chain");

  // Branches are isolated through the detector records (cat microstates of
  // different hot configurations are not orthogonal to each other).
  const auto rebuild = [&](const StateVector& detector_record, bool right, std::size_t config)
      -> std::pair<StateVector, double> {
    const StateVector watch = hilbert::tensor(
        hilbert::tensor(detector_record,
                        arrow_state(right ? factors::kRight : factors::kLeft)),
        cat_state(records.observer_seed, right, /*closed=*/false, config));
    const StateVector core = hilbert::contract(joint, watch);
    const StateVector closed = hilbert::tensor(
        hilbert::tensor(detector_record,
                        arrow_state(right ? factors::kRight : factors::kLeft)),
        cat_state(records.observer_seed, right, /*closed=*/true, config));
    return {hilbert::embed(joint.factors(), closed, core), weight_of(core)};
  };

  auto [out, captured] = rebuild(records.cold, /*right=*/false, 0);
  for (std::size_t n = 0; n < records.hot.size(); ++n) {
    auto [comp, w] = rebuild(records.hot[n], /*right=*/true, n + 1);
    out += comp;
    captured += w;
  }
  if (std::abs(captured - weight_of(joint)) > 1e-9)
    throw ConfigError("state does not carry the expected watching-cat structure");
  return out;
}

namespace {

// Detects which side of the arrow a component points and which cat microstate
// it carries; fills the optional label fields accordingly.
void fill_observer_labels(MacroLabel& label, const StateVector& component, double weight,
                          const RecordSet& records, bool right, std::size_t config) {
  if (weight <= 0.0) return;
  if (component.has_factor(factors::kArrow)) {
    const double w_side =
        weight_of(hilbert::contract(component, arrow_state(right ? factors::kRight
                                                                 : factors::kLeft)));
    if (w_side > (1.0 - 1e-9) * weight) label.arrow = right ? 'R' : 'L';
  }
  if (component.has_factor(factors::kCat)) {
    for (bool closed : {false, true}) {
      const StateVector cat = cat_state(records.observer_seed, right, closed, config);
      const double w_cat = weight_of(hilbert::contract(component, cat));
      if (w_cat > (1.0 - 1e-9) * weight) {
        label.cat = cat_mode_name(right, closed);
        break;
      }
    }
  }
}

}  // namespace

BranchDecomposition decompose(const StateVector& joint, const RecordSet& records,
                              Grouping grouping) {
  check_records_present(joint, records);

  // Micro components first; Macro2 merges the hot line.
  StateVector cold_comp = hilbert::project_onto(joint, records.cold);
  const double cold_w = weight_of(cold_comp);
  double captured = cold_w;

  std::vector<StateVector> hot_comps;
  std::vector<double> hot_w;
  for (std::size_t n = 0; n < records.hot.size(); ++n) {
    hot_comps.push_back(hilbert::project_onto(joint, records.hot[n]));
    hot_w.push_back(weight_of(hot_comps.back()));
    captured += hot_w.back();
  }
  if (std::abs(captured - weight_of(joint)) > 1e-9)
    throw ConfigError("joint state does not decompose into the detector records");

  BranchDecomposition out;
  out.grouping = grouping;

  if (cold_w > kWeightFloor) {
    MacroLabel label;
    label.detector = DetectorSide::Cold;
    fill_observer_labels(label, cold_comp, cold_w, records, /*right=*/false, 0);
    out.branches.push_back({label, cold_w, std::move(cold_comp)});
  }

  // Label every surviving hot configuration; Macro2 merges them and keeps
  // whatever observer labels the configurations agree on.
  std::vector<MacroLabel> hot_labels(hot_comps.size());
  for (std::size_t n = 0; n < hot_comps.size(); ++n) {
    if (hot_w[n] <= kWeightFloor) continue;
    hot_labels[n].detector = DetectorSide::Hot;
    hot_labels[n].hot_config = n + 1;
    fill_observer_labels(hot_labels[n], hot_comps[n], hot_w[n], records, /*right=*/true,
                         n + 1);
  }

  if (grouping == Grouping::Micro) {
    for (std::size_t n = 0; n < hot_comps.size(); ++n) {
      if (hot_w[n] <= kWeightFloor) continue;
      out.branches.push_back({hot_labels[n], hot_w[n], std::move(hot_comps[n])});
    }
    return out;
  }

  double merged_w = 0.0;
  StateVector merged;
  std::optional<char> common_arrow;
  std::optional<std::string> common_cat;
  bool first = true;
  for (std::size_t n = 0; n < hot_comps.size(); ++n) {
    if (hot_w[n] <= kWeightFloor) continue;
    if (first) {
      merged = std::move(hot_comps[n]);
      common_arrow = hot_labels[n].arrow;
      common_cat = hot_labels[n].cat;
      first = false;
    } else {
      merged += hot_comps[n];
      if (common_arrow != hot_labels[n].arrow) common_arrow.reset();
      if (common_cat != hot_labels[n].cat) common_cat.reset();
    }
    merged_w += hot_w[n];
  }
  if (merged_w > kWeightFloor) {
    MacroLabel label;
    label.detector = DetectorSide::Hot;
    label.arrow = common_arrow;
    label.cat = common_cat;
    out.branches.push_back({label, merged_w, std::move(merged)});
  }
  return out;
}

double cross_branch_interference(const BranchDecomposition& d, const optics::PathField& field) {
  if (d.branches.size() < 2) return 0.0;

  const auto paths = optics::unit_normalized_paths(field);

  // Path-resolved rows of each component: row[a] = ⟨a (atom-path)| component⟩.
  struct Rows {
    StateVector left;
    StateVector right;
  };
  std::vector<Rows> rows;
  rows.reserve(d.branches.size());
  const StateVector atom_left =
      StateVector::basis({std::string(factors::kAtomPath), 2}, factors::kLeft);
  const StateVector atom_right =
      StateVector::basis({std::string(factors::kAtomPath), 2}, factors::kRight);
  for (const BranchRecord& b : d.branches)
    rows.push_back({hilbert::contract(b.component, atom_left),
                    hilbert::contract(b.component, atom_right)});

  // Normalization constant of the reconstructed state's ignored pattern, so
  // the returned value lives on the same density scale as pattern_ignore.
  StateVector global = d.branches.front().component;
  for (std::size_t i = 1; i < d.branches.size(); ++i) global += d.branches[i].component;
  const std::vector<std::string> keep = {std::string(factors::kAtomPath)};
  const hilbert::DensityMatrix rho = hilbert::partial_trace(global, keep);
  double renorm = 0.0;
  for (std::size_t k = 0; k < field.grid.n; ++k) {
    renorm += rho(0, 0).real() * std::norm(paths.left[k]) +
              rho(1, 1).real() * std::norm(paths.right[k]) +
              2.0 * (rho(0, 1) * paths.left[k] * std::conj(paths.right[k])).real();
  }
  renorm *= field.grid.dx();
  renorm = std::max(renorm, 1e-300);

  double worst = 0.0;
  for (std::size_t i = 0; i < d.branches.size(); ++i) {
    for (std::size_t j = i + 1; j < d.branches.size(); ++j) {
      const cplx s_ll = hilbert::inner(rows[j].left, rows[i].left);
      const cplx s_lr = hilbert::inner(rows[j].right, rows[i].left);
      const cplx s_rl = hilbert::inner(rows[j].left, rows[i].right);
      const cplx s_rr = hilbert::inner(rows[j].right, rows[i].right);
      for (std::size_t k = 0; k < field.grid.n; ++k) {
        const cplx pl = paths.left[k];
        const cplx pr = paths.right[k];
        const cplx cross = s_ll * pl * std::conj(pl) + s_lr * pl * std::conj(pr) +
                           s_rl * pr * std::conj(pl) + s_rr * pr * std::conj(pr);
        worst = std::max(worst, std::abs(2.0 * cross.real()) / renorm);
      }
    }
  }
  return worst;
}

double self_location_probability(const BranchDecomposition& d, const MacroLabel& query) {
  double total = 0.0;
  bool found = false;
  for (const BranchRecord& b : d.branches) {
    if (matches(b.label, query)) {
      total += b.weight;
      found = true;
    }
  }
  if (!found) throw QueryError("no branch matches label '" + to_string(query) + "'");
  return total;
}

std::map<std::string, std::uint64_t> sample_outcomes(const BranchDecomposition& d,
                                                     std::uint64_t trials,
                                                     std::uint64_t seed) {
  if (trials < 1) throw ConfigError("sampling requires at least one trial");
  if (d.branches.empty()) throw ConfigError("cannot sample from an empty decomposition");

  std::vector<double> cumulative;
  cumulative.reserve(d.branches.size());
  double total = 0.0;
  for (const BranchRecord& b : d.branches) {
    total += b.weight;
    cumulative.push_back(total);
  }

  std::map<std::string, std::uint64_t> counts;
  for (const BranchRecord& b : d.branches) counts[to_string(b.label)] = 0;

  rng::Stream stream(rng::derive(seed, "sample"));
  for (std::uint64_t t = 0; t < trials; ++t) {
    const double r = stream.uniform() * total;
    std::size_t pick = d.branches.size() - 1;
    for (std::size_t i = 0; i < cumulative.size(); ++i) {
      if (r < cumulative[i]) {
        pick = i;
        break;
      }
    }
    ++counts[to_string(d.branches[pick].label)];
  }
  return counts;
}

nlohmann::json branch_table_json(const BranchDecomposition& d) {
  nlohmann::json j;
  j["grouping"] = d.grouping == Grouping::Macro2 ? "macro2" : "micro";
  j["branches"] = nlohmann::json::array();
  for (const BranchRecord& b : d.branches)
    j["branches"].push_back({{"label", to_string(b.label)}, {"weight", b.weight}});
  return j;
}

void write_branch_csv(std::ostream& out, const BranchDecomposition& d) {
  out << "label,weight\n";
  char buf[64];
  for (const BranchRecord& b : d.branches) {
    std::snprintf(buf, sizeof(buf), "%.17g", b.weight);
    out << to_string(b.label) << ',' << buf << '\n';
  }
}

nlohmann::json counts_json(const std::map<std::string, std::uint64_t>& counts) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [label, count] : counts) j[label] = count;
  return j;
}

}  // namespace whichpath::branches
