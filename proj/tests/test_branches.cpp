// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "whichpath/branches.hpp"
#include "whichpath/detectors.hpp"
#include "whichpath/errors.hpp"
#include "whichpath/factors.hpp"
#include "whichpath/optics.hpp"
#include "whichpath/rng.hpp"

using namespace whichpath;
using branches::BranchDecomposition;
using branches::DetectorSide;
using branches::Grouping;
using branches::MacroLabel;
using branches::RecordSet;
using detectors::Bolometer;
using hilbert::cplx;
using hilbert::StateVector;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

StateVector balanced_atom() { return factors::atom_state({kInvSqrt2, 0}, {kInvSqrt2, 0}); }

StateVector imbalanced_atom() {
  return factors::atom_state({0.1, 0}, {std::sqrt(0.99), 0});
}

// 1:99 bolometer chain of the probability discussion: p close enough to one
// that the all-miss weight is negligible at 1e-12.
const Bolometer kBornBolometer{8, 0.99, 2, 0, 0.0, 13};

StateVector born_state(bool observers, bool closed) {
  StateVector joint = detectors::couple_bolometer(imbalanced_atom(), kBornBolometer);
  joint = detectors::attach_external_environment(joint, kBornBolometer);
  if (observers) {
    const RecordSet records = branches::records_for(kBornBolometer);
    joint = branches::attach_observer_chain(joint, records);
    if (closed) joint = branches::attach_closed_eyes(joint, records);
  }
  return joint;
}

double total_weight(const BranchDecomposition& d) {
  double w = 0.0;
  for (const auto& b : d.branches) w += b.weight;
  return w;
}

}  // namespace

TEST_CASE("observer chain points the arrow with the branch weights") {
  const RecordSet records = branches::records_for(kBornBolometer);

  const StateVector balanced = branches::attach_observer_chain(
      detectors::attach_external_environment(
          detectors::couple_bolometer(balanced_atom(), kBornBolometer), kBornBolometer),
      records);
  const std::vector<std::string> keep = {std::string(factors::kArrow)};
  const auto rho_balanced = hilbert::partial_trace(balanced, keep);
  CHECK(std::abs(rho_balanced(0, 0) - cplx{0.5, 0}) < 1e-9);
  CHECK(std::abs(rho_balanced(1, 1) - cplx{0.5, 0}) < 1e-9);

  const StateVector imbalanced = born_state(true, false);
  const auto rho = hilbert::partial_trace(imbalanced, keep);
  CHECK(std::abs(rho(0, 0) - cplx{0.01, 0}) < 1e-12);
  CHECK(std::abs(rho(1, 1) - cplx{0.99, 0}) < 1e-12);
  CHECK(std::abs(imbalanced.norm() - 1.0) < 1e-12);
}

TEST_CASE("projecting onto arrow-left returns exactly the cold branch") {
  const StateVector joint = born_state(true, false);
  const RecordSet records = branches::records_for(kBornBolometer);

  const StateVector arrow_left =
      hilbert::project_onto(joint, StateVector::basis({std::string(factors::kArrow), 2}, 0));
  const StateVector cold = hilbert::project_onto(joint, records.cold);
  REQUIRE(arrow_left.dim() == cold.dim());
  for (std::size_t i = 0; i < cold.dim(); ++i)
    CHECK(std::abs(arrow_left.amp(i) - cold.amp(i)) < 1e-12);
}

TEST_CASE("attach_observer_chain demands the detector structure") {
  const RecordSet records = branches::records_for(kBornBolometer);
  CHECK_THROWS_AS(branches::attach_observer_chain(balanced_atom(), records), ConfigError);
}

TEST_CASE("closing the eyes relabels the cat without moving weight") {
  const StateVector open_eyes = born_state(true, false);
  const RecordSet records = branches::records_for(kBornBolometer);
  const StateVector closed = branches::attach_closed_eyes(open_eyes, records);
  CHECK(std::abs(closed.norm() - 1.0) < 1e-12);

  const auto before = branches::decompose(open_eyes, records, Grouping::Macro2);
  const auto after = branches::decompose(closed, records, Grouping::Macro2);
  REQUIRE(before.branches.size() == after.branches.size());
  for (std::size_t i = 0; i < before.branches.size(); ++i) {
    CHECK(std::abs(before.branches[i].weight - after.branches[i].weight) < 1e-12);
    CHECK(before.branches[i].label.detector == after.branches[i].label.detector);
    CHECK(before.branches[i].label.arrow == after.branches[i].label.arrow);
  }
  CHECK(before.branches[0].label.cat == "sawL");
  CHECK(after.branches[0].label.cat == "closedL");
  CHECK(after.branches[1].label.cat == "closedR");

  // eyes-closed cat states of the two lines are orthogonal: L lives in
  // span{e0,e1}, R in span{e2,e3}
  const std::vector<std::string> keep_cat = {std::string(factors::kCat)};
  const auto rho_l = hilbert::partial_trace(after.branches[0].component.normalized(), keep_cat);
  const auto rho_r = hilbert::partial_trace(after.branches[1].component.normalized(), keep_cat);
  CHECK(std::abs(rho_l(2, 2)) + std::abs(rho_l(3, 3)) < 1e-12);
  CHECK(std::abs(rho_r(0, 0)) + std::abs(rho_r(1, 1)) < 1e-12);
}

TEST_CASE("which-path pair decomposes into two half-weight branches") {
  const detectors::QubitDetector qubit{0.0, 1.0};
  const StateVector joint = detectors::couple_qubit(balanced_atom(), qubit);
  const auto d = branches::decompose(joint, branches::records_for(qubit), Grouping::Macro2);
  REQUIRE(d.branches.size() == 2);
  CHECK(std::abs(d.branches[0].weight - 0.5) < 1e-12);
  CHECK(std::abs(d.branches[1].weight - 0.5) < 1e-12);
  CHECK(d.branches[0].label.detector == DetectorSide::Cold);
  CHECK(d.branches[1].label.detector == DetectorSide::Hot);
}

TEST_CASE("imbalanced chain decomposes into 1:99 branches") {
  const StateVector joint = born_state(true, false);
  const RecordSet records = branches::records_for(kBornBolometer);
  const auto d = branches::decompose(joint, records, Grouping::Macro2);
  REQUIRE(d.branches.size() == 2);
  CHECK(std::abs(d.branches[0].weight - 0.01) < 1e-12);
  CHECK(std::abs(d.branches[1].weight - 0.99) < 1e-12);
  CHECK(d.branches[0].label.arrow == 'L');
  CHECK(d.branches[1].label.arrow == 'R');
  CHECK(d.branches[0].label.cat == "sawL");
  CHECK(d.branches[1].label.cat == "sawR");
}

TEST_CASE("an unentangled state is a single branch of weight one") {
  const detectors::QubitDetector off{0.0, 0.0};
  const StateVector joint = detectors::couple_qubit(balanced_atom(), off);
  const auto d = branches::decompose(joint, branches::records_for(off), Grouping::Micro);
  REQUIRE(d.branches.size() == 1);
  CHECK(std::abs(d.branches[0].weight - 1.0) < 1e-12);
  CHECK(d.branches[0].label.detector == DetectorSide::Cold);
}

TEST_CASE("branch components are orthogonal and rebuild the state") {
  for (const Grouping grouping : {Grouping::Macro2, Grouping::Micro}) {
    const StateVector joint = born_state(true, false);
    const RecordSet records = branches::records_for(kBornBolometer);
    const auto d = branches::decompose(joint, records, grouping);

    CHECK(std::abs(total_weight(d) - 1.0) < 1e-9);

    StateVector sum = d.branches[0].component;
    for (std::size_t i = 1; i < d.branches.size(); ++i) sum += d.branches[i].component;
    // the dropped sub-floor tail is far below the reconstruction tolerance
    for (std::size_t i = 0; i < joint.dim(); ++i)
      CHECK(std::abs(sum.amp(i) - joint.amp(i)) < 1e-9);

    for (std::size_t i = 0; i < d.branches.size(); ++i) {
      CHECK(std::abs(std::pow(d.branches[i].component.norm(), 2) - d.branches[i].weight) <
            1e-12);
      for (std::size_t j = i + 1; j < d.branches.size(); ++j)
        CHECK(std::abs(hilbert::inner(d.branches[i].component, d.branches[j].component)) <
              1e-9);
    }
  }
}

TEST_CASE("a partially overlapping molecule record still splits orthogonally") {
  // overlap_c > 0: the bump record u-perp is orthogonalized against u, so the
  // decomposition stays exact even though |b> itself overlaps |u>
  const detectors::MoleculeDetector det{std::sqrt(0.1), std::sqrt(0.9), 0.4, 4, 7};
  const StateVector joint = detectors::couple_molecule(balanced_atom(), det);
  const auto d = branches::decompose(joint, branches::records_for(det), Grouping::Macro2);

  CHECK(std::abs(total_weight(d) - 1.0) < 1e-12);
  REQUIRE(d.branches.size() == 2);
  CHECK(std::abs(hilbert::inner(d.branches[0].component, d.branches[1].component)) < 1e-12);

  StateVector sum = d.branches[0].component;
  sum += d.branches[1].component;
  for (std::size_t i = 0; i < joint.dim(); ++i)
    CHECK(std::abs(sum.amp(i) - joint.amp(i)) < 1e-12);
}

TEST_CASE("micro weights sum to the macro groups") {
  const StateVector joint = born_state(false, false);
  const RecordSet records = branches::records_for(kBornBolometer);
  const auto macro = branches::decompose(joint, records, Grouping::Macro2);
  const auto micro = branches::decompose(joint, records, Grouping::Micro);

  double micro_cold = 0.0;
  double micro_hot = 0.0;
  for (const auto& b : micro.branches) {
    if (b.label.detector == DetectorSide::Cold)
      micro_cold += b.weight;
    else
      micro_hot += b.weight;
  }
  CHECK(std::abs(micro_cold - macro.branches[0].weight) < 1e-12);
  CHECK(std::abs(micro_hot - macro.branches[1].weight) < 1e-12);
  CHECK(micro.branches.size() > 2);  // the hot line really is a group
}

TEST_CASE("attaching observers never changes established weights or coherence") {
  const StateVector bare = born_state(false, false);
  const RecordSet records = branches::records_for(kBornBolometer);
  const StateVector watched = branches::attach_observer_chain(bare, records);
  const StateVector closed = branches::attach_closed_eyes(watched, records);

  const auto d0 = branches::decompose(bare, records, Grouping::Macro2);
  const auto d1 = branches::decompose(watched, records, Grouping::Macro2);
  const auto d2 = branches::decompose(closed, records, Grouping::Macro2);
  for (std::size_t i = 0; i < d0.branches.size(); ++i) {
    CHECK(std::abs(d0.branches[i].weight - d1.branches[i].weight) < 1e-12);
    CHECK(std::abs(d0.branches[i].weight - d2.branches[i].weight) < 1e-12);
  }

  const double v0 = optics::coherence_visibility(bare);
  CHECK(optics::coherence_visibility(watched) <= v0 + 1e-12);
  CHECK(optics::coherence_visibility(closed) <= v0 + 1e-12);
}

TEST_CASE("decohered branches show no cross-interference on the screen") {
  const optics::PathField field = optics::gaussian_slit_field({}, {});

  const Bolometer det{4, 1.0, 2, 0, 0.0, 31};
  StateVector joint = detectors::attach_external_environment(
      detectors::couple_bolometer(balanced_atom(), det), det);
  const auto d = branches::decompose(joint, branches::records_for(det), Grouping::Micro);
  CHECK(branches::cross_branch_interference(d, field) <= 1e-9);

  // single branch: zero by definition
  const detectors::QubitDetector off{0.0, 0.0};
  const auto single = branches::decompose(detectors::couple_qubit(balanced_atom(), off),
                                          branches::records_for(off), Grouping::Macro2);
  REQUIRE(single.branches.size() == 1);
  CHECK(branches::cross_branch_interference(single, field) == 0.0);

  // an eraser branch keeps its own interference even though the which-path
  // branches share none: the conditional pattern on |+> stays fringed
  const detectors::QubitDetector qubit{0.0, 1.0};
  const StateVector pair = detectors::couple_qubit(balanced_atom(), qubit);
  const StateVector plus = StateVector::single({std::string(factors::kQubit), 2},
                                               {cplx{kInvSqrt2, 0}, cplx{kInvSqrt2, 0}});
  const optics::ScreenPattern eraser_branch =
      optics::pattern_conditional(field, pair, plus, "cond:+");
  double own_interference = 0.0;
  double peak_baseline = 0.0;
  for (std::size_t i = 0; i < eraser_branch.density.size(); ++i) {
    own_interference = std::max(own_interference,
                                std::abs(eraser_branch.density[i] - eraser_branch.baseline[i]));
    peak_baseline = std::max(peak_baseline, eraser_branch.baseline[i]);
  }
  CHECK(own_interference > 0.1 * peak_baseline);
  CHECK(optics::fringe_visibility(eraser_branch) >= 1.0 - 1e-9);
}

TEST_CASE("self-location probabilities follow the Born weights") {
  const StateVector joint = born_state(true, true);
  const RecordSet records = branches::records_for(kBornBolometer);
  const auto d = branches::decompose(joint, records, Grouping::Macro2);

  MacroLabel right;
  right.arrow = 'R';
  CHECK(std::abs(branches::self_location_probability(d, right) - 0.99) < 1e-12);

  MacroLabel left;
  left.arrow = 'L';
  const double p_left = branches::self_location_probability(d, left);
  CHECK(std::abs(p_left - 0.01) < 1e-12);
  CHECK(std::abs(p_left + branches::self_location_probability(d, right) - 1.0) < 1e-12);

  const auto balanced = branches::decompose(
      detectors::couple_qubit(balanced_atom(), {0.0, 1.0}),
      branches::records_for(detectors::QubitDetector{0.0, 1.0}), Grouping::Macro2);
  MacroLabel cold;
  cold.detector = DetectorSide::Cold;
  CHECK(std::abs(branches::self_location_probability(balanced, cold) - 0.5) < 1e-12);

  MacroLabel nonsense;
  nonsense.hot_config = 99;
  CHECK_THROWS_AS(branches::self_location_probability(d, nonsense), QueryError);
}

TEST_CASE("sampling is seed-deterministic and degenerate weights are exact") {
  const detectors::QubitDetector off{0.0, 0.0};
  const StateVector product = detectors::couple_qubit(factors::atom_state({1, 0}, {0, 0}), off);
  const auto single = branches::decompose(product, branches::records_for(off), Grouping::Macro2);
  const auto counts = branches::sample_outcomes(single, 1000, 5);
  CHECK(counts.at("C") == 1000);

  const StateVector joint = born_state(true, false);
  const auto d =
      branches::decompose(joint, branches::records_for(kBornBolometer), Grouping::Macro2);
  const auto a = branches::sample_outcomes(d, 20000, 7);
  const auto b = branches::sample_outcomes(d, 20000, 7);
  CHECK(a == b);
  std::uint64_t total = 0;
  for (const auto& [label, count] : a) total += count;
  CHECK(total == 20000);
}

TEST_CASE("sampled frequencies track the weights within binomial error") {
  const StateVector joint = born_state(true, false);
  const auto d =
      branches::decompose(joint, branches::records_for(kBornBolometer), Grouping::Macro2);

  const std::uint64_t trials = 100000;
  const auto counts = branches::sample_outcomes(d, trials, 42);
  double hot = 0.0;
  for (const auto& [label, count] : counts)
    if (label.rfind("H", 0) == 0) hot += static_cast<double>(count);
  const double freq = hot / static_cast<double>(trials);
  // binomial standard error: sqrt(0.99 * 0.01 / trials), three sigma
  CHECK(std::abs(freq - 0.99) <= 3.0 * std::sqrt(0.99 * 0.01 / static_cast<double>(trials)));
}

TEST_CASE("chi-squared of sampled counts stays inside the 99% band (1 excursion allowed)") {
  const StateVector joint = born_state(true, false);
  const auto d =
      branches::decompose(joint, branches::records_for(kBornBolometer), Grouping::Macro2);
  const std::uint64_t trials = 20000;
  const double expected_cold = 0.01 * static_cast<double>(trials);
  const double expected_hot = 0.99 * static_cast<double>(trials);
  const double quantile_99_dof1 = 6.634896601021213;

  int excursions = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto counts = branches::sample_outcomes(d, trials, seed);
    double cold = 0.0;
    for (const auto& [label, count] : counts)
      if (label.rfind("C", 0) == 0) cold += static_cast<double>(count);
    const double hot = static_cast<double>(trials) - cold;
    const double chi2 = std::pow(cold - expected_cold, 2) / expected_cold +
                        std::pow(hot - expected_hot, 2) / expected_hot;
    if (chi2 > quantile_99_dof1) ++excursions;
  }
  CHECK(excursions <= 1);
}

TEST_CASE("branch tables serialize to CSV and JSON") {
  const StateVector joint = born_state(true, false);
  const auto d =
      branches::decompose(joint, branches::records_for(kBornBolometer), Grouping::Macro2);

  std::ostringstream csv;
  branches::write_branch_csv(csv, d);
  CHECK(csv.str().rfind("label,weight\n", 0) == 0);
  CHECK(csv.str().find("C|arrow-L|cat-sawL") != std::string::npos);

  const nlohmann::json j = branches::branch_table_json(d);
  CHECK(j["grouping"] == "macro2");
  CHECK(j["branches"].size() == 2);

  const auto counts = branches::sample_outcomes(d, 100, 3);
  const nlohmann::json cj = branches::counts_json(counts);
  std::uint64_t total = 0;
  for (const auto& [key, value] : cj.items()) total += value.get<std::uint64_t>();
  CHECK(total == 100);
}
