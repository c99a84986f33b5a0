// SPDX-License-Identifier: Apache-2.0
#include "whichpath/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <fstream>
#include <sstream>

#include "whichpath/errors.hpp"
#include "whichpath/factors.hpp"

namespace whichpath::cli {
namespace {

using branches::BranchDecomposition;
using branches::RecordSet;
using hilbert::cplx;
using hilbert::StateVector;
using optics::PathField;
using optics::ScreenPattern;

constexpr double kTinyTol = 1e-12;
constexpr double kPipelineTol = 1e-9;

void add_check(std::vector<CheckResult>& checks, std::string name, double measured,
               double bound) {
  checks.push_back({std::move(name), measured <= bound, measured, bound});
}

double max_pointwise_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

// Mirror-symmetric grids pair index i with n-1-i.
double mirror_asymmetry(const ScreenPattern& p) {
  double worst = 0.0;
  for (std::size_t i = 0; i < p.density.size(); ++i)
    worst = std::max(worst, std::abs(p.density[i] - p.density[p.density.size() - 1 - i]));
  return worst;
}

struct Assembled {
  StateVector joint;
  std::optional<RecordSet> records;
};

Assembled assemble_state(const Scenario& s) {
  const StateVector atom = factors::atom_state(s.amp_left, s.amp_right);

  if (std::holds_alternative<std::monostate>(s.detector)) return {atom, std::nullopt};

  if (const auto* qubit = std::get_if<detectors::QubitDetector>(&s.detector)) {
    return {detectors::couple_qubit(atom, *qubit), branches::records_for(*qubit)};
  }
  if (const auto* mol = std::get_if<detectors::MoleculeDetector>(&s.detector)) {
    return {detectors::couple_molecule(atom, *mol), branches::records_for(*mol)};
  }
  const auto& bol = std::get<detectors::Bolometer>(s.detector);
  StateVector joint = detectors::couple_bolometer(atom, bol);
  joint = detectors::attach_external_environment(joint, bol);
  const RecordSet records = branches::records_for(bol);
  if (s.observers.attach_arrow_cat) {
    joint = branches::attach_observer_chain(joint, records);
    if (s.observers.eyes_closed) joint = branches::attach_closed_eyes(joint, records);
  }
  return {std::move(joint), records};
}

void append_conditionals(std::vector<ScreenPattern>& patterns, const PathField& field,
                         const Scenario& s, const StateVector& joint,
                         const RecordSet& records) {
  if (std::holds_alternative<detectors::QubitDetector>(s.detector)) {
    const detectors::ReadoutBasis computational;
    std::vector<detectors::ReadoutBasis> bases = {computational};
    if (s.readout && std::abs(s.readout->theta) > 1e-12) bases.push_back(*s.readout);
    for (const detectors::ReadoutBasis& basis : bases) {
      const auto states = basis.states();
      for (std::size_t k = 0; k < 2; ++k) {
        const StateVector outcome = StateVector::single(
            {std::string(factors::kQubit), 2}, {states[k][0], states[k][1]});
        patterns.push_back(optics::pattern_conditional(field, joint, outcome,
                                                       "cond:" + basis.outcome_label(k)));
      }
    }
    return;
  }

  if (std::holds_alternative<detectors::MoleculeDetector>(s.detector)) {
    patterns.push_back(
        optics::pattern_conditional(field, joint, records.cold, "cond:unbumped"));
    patterns.push_back(
        optics::pattern_conditional(field, joint, records.hot[0], "cond:bumped"));
    return;
  }

  // Bolometer: cold outcome plus the merged hot line.
  patterns.push_back(optics::pattern_conditional(field, joint, records.cold, "cond:C"));
  ScreenPattern hot = optics::pattern_conditional(field, joint, records.hot[0], "cond:H");
  for (std::size_t n = 1; n < records.hot.size(); ++n) {
    const ScreenPattern part =
        optics::pattern_conditional(field, joint, records.hot[n], "cond:H");
    for (std::size_t i = 0; i < hot.density.size(); ++i) {
      hot.density[i] += part.density[i];
      hot.baseline[i] += part.baseline[i];
    }
  }
  patterns.push_back(std::move(hot));
}

nlohmann::json bell_block(const Scenario& s, std::vector<CheckResult>& checks) {
  const BellOptions& opt = *s.bell;
  nlohmann::json report;

  nlohmann::json table = nlohmann::json::array();
  for (const auto& remote : opt.remote_axes) {
    const bell::JointStatistics stats = bell::joint_statistics(remote, opt.local_axis);
    nlohmann::json row;
    row["settings"] = {{"remote", {remote.x, remote.y, remote.z}},
                       {"local", {opt.local_axis.x, opt.local_axis.y, opt.local_axis.z}}};
    row["probabilities"] = {{"up-up", stats.probabilities[0][0]},
                            {"up-down", stats.probabilities[0][1]},
                            {"down-up", stats.probabilities[1][0]},
                            {"down-down", stats.probabilities[1][1]}};
    row["E"] = stats.correlation;
    table.push_back(row);

    const double expected = -remote.dot(opt.local_axis);
    add_check(checks, "bell-correlation-closed-form",
              std::abs(stats.correlation - expected), kTinyTol);
  }
  report["correlations"] = table;

  double deviation = 0.0;
  if (opt.order != BellOrder::LocalFirst)
    deviation = std::max(deviation, bell::no_signaling_check(opt.remote_axes, opt.local_axis,
                                                             bell::Order::RemoteFirst));
  if (opt.order != BellOrder::RemoteFirst)
    deviation = std::max(deviation, bell::no_signaling_check(opt.remote_axes, opt.local_axis,
                                                             bell::Order::LocalFirst));
  report["max_marginal_deviation"] = deviation;
  add_check(checks, "bell-no-signaling", deviation, kTinyTol);

  // CHSH at the standard coplanar angles.
  const bell::MeasurementAxis a1(0, 0, 1), a2(1, 0, 0);
  const double inv = 1.0 / std::sqrt(2.0);
  const bell::MeasurementAxis b1(inv, 0, inv), b2(-inv, 0, inv);
  const double s_value = bell::chsh(a1, a2, b1, b2);
  report["S"] = s_value;
  add_check(checks, "bell-chsh-tsirelson", std::abs(std::abs(s_value) - 2.0 * std::sqrt(2.0)),
            kPipelineTol);
  return report;
}

void write_svg(std::ostream& out, const std::vector<ScreenPattern>& patterns) {
  constexpr double width = 800.0;
  constexpr double height = 400.0;
  constexpr double margin = 40.0;
  static const char* colors[] = {"#222222", "#1f77b4", "#d62728", "#8c564b",
                                 "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

  double peak = 0.0;
  for (const auto& p : patterns)
    for (double v : p.density) peak = std::max(peak, v);
  if (peak <= 0.0) peak = 1.0;

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << width << " " << height
      << "\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\""
      << width - margin << "\" y2=\"" << height - margin
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\""
      << height - margin << "\" stroke=\"black\" stroke-width=\"1\"/>\n";

  if (!patterns.empty()) {
    const optics::ScreenGrid& grid = patterns.front().grid;
    for (int t = 0; t <= 4; ++t) {
      const double x = grid.x_min + (grid.x_max - grid.x_min) * t / 4.0;
      const double px = margin + (width - 2 * margin) * t / 4.0;
      out << "<line x1=\"" << px << "\" y1=\"" << height - margin << "\" x2=\"" << px
          << "\" y2=\"" << height - margin + 5 << "\" stroke=\"black\"/>\n";
      char label[32];
      std::snprintf(label, sizeof(label), "%g", x);
      out << "<text x=\"" << px << "\" y=\"" << height - margin + 18
          << "\" font-size=\"10\" text-anchor=\"middle\">" << label << "</text>\n";
    }
  }

  std::size_t color = 0;
  double legend_y = margin;
  for (const auto& p : patterns) {
    out << "<polyline fill=\"none\" stroke=\"" << colors[color % 8]
        << "\" stroke-width=\"1\" points=\"";
    for (std::size_t i = 0; i < p.density.size(); ++i) {
      const double fx = static_cast<double>(i) / static_cast<double>(p.density.size() - 1);
      const double px = margin + (width - 2 * margin) * fx;
      const double py = height - margin - (height - 2 * margin) * (p.density[i] / peak);
      char pt[64];
      std::snprintf(pt, sizeof(pt), "%.2f,%.2f ", px, py);
      out << pt;
    }
    out << "\"/>\n";
    out << "<text x=\"" << width - margin - 150 << "\" y=\"" << legend_y
        << "\" font-size=\"11\" fill=\"" << colors[color % 8] << "\">" << p.label
        << "</text>\n";
    legend_y += 14.0;
    ++color;
  }
  out << "</svg>\n";
}

void write_file(const std::filesystem::path& path, const std::string& contents,
                std::vector<std::string>& files) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << contents;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
  files.push_back(path.filename().string());
}

}  // namespace

bool RunReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.pass; });
}

RunData run_scenario(const Scenario& s) {
  RunData data;

  if (s.bell) data.bell_report = bell_block(s, data.checks);

  const bool wants_interferometer = !s.bell || s.has_detector();
  if (!wants_interferometer) return data;

  PathField field = optics::gaussian_slit_field(s.geometry, s.grid);
  if (const auto* qubit = std::get_if<detectors::QubitDetector>(&s.detector))
    optics::apply_backaction_kick(field, qubit->backaction_kick);

  Assembled assembled = assemble_state(s);
  add_check(data.checks, "state-norm", std::abs(assembled.joint.norm() - 1.0), kPipelineTol);

  data.patterns.push_back(optics::pattern_ignore(field, assembled.joint, "total"));
  if (assembled.records)
    append_conditionals(data.patterns, field, s, assembled.joint, *assembled.records);

  const double dx = s.grid.dx();
  double integral = 0.0;
  for (double v : data.patterns.front().density) integral += v;
  add_check(data.checks, "total-pattern-integral", std::abs(integral * dx - 1.0),
            kPipelineTol);

  // Conditional patterns over a complete record set must rebuild the ignored
  // pattern pointwise.
  if (assembled.records) {
    std::vector<double> sum(s.grid.n, 0.0);
    bool have_sum = false;
    if (std::holds_alternative<detectors::QubitDetector>(s.detector)) {
      for (const auto& p : data.patterns) {
        if (p.label == "cond:0" || p.label == "cond:1") {
          for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += p.density[i];
          have_sum = true;
        }
      }
    } else {
      for (const auto& p : data.patterns) {
        if (p.label.rfind("cond:", 0) == 0) {
          for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += p.density[i];
          have_sum = true;
        }
      }
    }
    if (have_sum)
      add_check(data.checks, "conditional-sum-rule",
                max_pointwise_diff(sum, data.patterns.front().density), kPipelineTol);
  }

  const bool balanced = std::abs(std::norm(s.amp_left) - std::norm(s.amp_right)) < 1e-12;
  const auto* qubit = std::get_if<detectors::QubitDetector>(&s.detector);
  const bool kicked = qubit && qubit->backaction_kick != 0.0;
  if (balanced && !kicked)
    add_check(data.checks, "mirror-symmetry", mirror_asymmetry(data.patterns.front()),
              kTinyTol);

  // Eraser recovery: a perfectly coupled, kick-free qubit read out in the
  // +/- basis yields full-contrast conditional fringes.
  if (qubit && qubit->efficiency == 1.0 && !kicked && balanced && s.readout &&
      std::abs(s.readout->theta - std::numbers::pi / 2.0) < 1e-12 &&
      std::abs(s.readout->phi) < 1e-12) {
    double worst = 0.0;
    for (const auto& p : data.patterns)
      if (p.label == "cond:+" || p.label == "cond:-")
        worst = std::max(worst, 1.0 - optics::fringe_visibility(p));
    add_check(data.checks, "eraser-visibility", worst, 1e-6);
  }

  if (assembled.records) {
    data.macro2 = branches::decompose(assembled.joint, *assembled.records,
                                      branches::Grouping::Macro2);
    data.micro = branches::decompose(assembled.joint, *assembled.records,
                                     branches::Grouping::Micro);

    double macro_total = 0.0;
    for (const auto& b : data.macro2->branches) macro_total += b.weight;
    add_check(data.checks, "branch-weights-sum", std::abs(macro_total - 1.0), kPipelineTol);

    double micro_total = 0.0;
    for (const auto& b : data.micro->branches) micro_total += b.weight;
    add_check(data.checks, "micro-macro-consistency", std::abs(micro_total - macro_total),
              kTinyTol);

    if (s.sampling.trials > 0) {
      data.counts =
          branches::sample_outcomes(*data.macro2, s.sampling.trials, s.sampling.seed);
      std::uint64_t total = 0;
      for (const auto& [label, count] : *data.counts) total += count;
      add_check(data.checks, "sampling-count-conservation",
                total == s.sampling.trials ? 0.0 : 1.0, 0.5);
    }
  }

  data.joint = std::move(assembled.joint);
  return data;
}

RunReport run(const Scenario& s, const std::filesystem::path& out_dir,
              const std::set<Format>& formats) {
  const auto t0 = std::chrono::steady_clock::now();

  RunData data = run_scenario(s);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir.string() + "'");

  RunReport report;
  report.scenario = s.name;
  report.checks = data.checks;

  if (!data.patterns.empty()) {
    if (formats.contains(Format::Csv)) {
      std::ostringstream csv;
      optics::write_csv(csv, data.patterns);
      write_file(out_dir / "patterns.csv", csv.str(), report.files);
    }
    if (formats.contains(Format::Json)) {
      nlohmann::json j;
      j["scenario"] = s.name;
      j["patterns"] = nlohmann::json::array();
      for (const auto& p : data.patterns) j["patterns"].push_back(optics::to_json(p));
      write_file(out_dir / "patterns.json", j.dump(2) + "\n", report.files);
    }
    if (formats.contains(Format::Svg)) {
      std::ostringstream svg;
      write_svg(svg, data.patterns);
      write_file(out_dir / "patterns.svg", svg.str(), report.files);
    }
  }

  if (data.macro2) {
    if (formats.contains(Format::Csv)) {
      std::ostringstream csv;
      branches::write_branch_csv(csv, *data.macro2);
      write_file(out_dir / "branches.csv", csv.str(), report.files);
    }
    if (formats.contains(Format::Json)) {
      nlohmann::json j;
      j["scenario"] = s.name;
      j["macro2"] = branches::branch_table_json(*data.macro2);
      j["micro"] = branches::branch_table_json(*data.micro);
      write_file(out_dir / "branches.json", j.dump(2) + "\n", report.files);
    }
  }

  if (data.counts && formats.contains(Format::Json)) {
    nlohmann::json j;
    j["scenario"] = s.name;
    j["trials"] = s.sampling.trials;
    j["seed"] = s.sampling.seed;
    j["counts"] = branches::counts_json(*data.counts);
    write_file(out_dir / "counts.json", j.dump(2) + "\n", report.files);
  }

  if (!data.bell_report.is_null() && formats.contains(Format::Json)) {
    nlohmann::json j = data.bell_report;
    j["scenario"] = s.name;
    write_file(out_dir / "bell.json", j.dump(2) + "\n", report.files);
  }

  const auto t1 = std::chrono::steady_clock::now();
  report.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return report;
}

}  // namespace whichpath::cli
