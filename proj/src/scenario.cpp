// SPDX-License-Identifier: Apache-2.0
#include "whichpath/scenario.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "whichpath/errors.hpp"

namespace whichpath::cli {
namespace {

using nlohmann::json;

std::size_t line_of_byte(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (key == a) known = true;
    if (!known) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

double require_number(const json& obj, const std::string& where, const char* key,
                      double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw ConfigError(where + ": '" + std::string(key) +
                                               "' must be a number");
  return obj[key].get<double>();
}

std::uint64_t require_uint(const json& obj, const std::string& where, const char* key,
                           std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_unsigned())
    throw ConfigError(where + ": '" + std::string(key) + "' must be a nonnegative integer");
  return obj[key].get<std::uint64_t>();
}

hilbert::cplx parse_amp(const json& value, const std::string& where) {
  if (!value.is_array() || value.size() != 2 || !value[0].is_number() || !value[1].is_number())
    throw ConfigError(where + ": amplitude must be a [magnitude, phase] pair");
  const double mag = value[0].get<double>();
  const double phase = value[1].get<double>();
  if (mag < 0.0) throw ConfigError(where + ": amplitude magnitude must be nonnegative");
  return hilbert::cplx{mag * std::cos(phase), mag * std::sin(phase)};
}

bell::MeasurementAxis parse_axis(const json& value, const std::string& where) {
  if (!value.is_array() || value.size() != 3)
    throw ConfigError(where + ": axis must be an [x, y, z] triple");
  for (const auto& c : value)
    if (!c.is_number()) throw ConfigError(where + ": axis components must be numbers");
  return bell::MeasurementAxis(value[0].get<double>(), value[1].get<double>(),
                               value[2].get<double>());
}

DetectorModel parse_detector(const json& obj, const std::string& where) {
  if (!obj.is_object() || !obj.contains("type"))
    throw ConfigError(where + ": detector needs a 'type' field");
  const std::string type = obj["type"].get<std::string>();

  if (type == "qubit") {
    check_keys(obj, where, {"type", "efficiency", "backaction_kick"});
    detectors::QubitDetector det;
    det.efficiency = require_number(obj, where, "efficiency", det.efficiency);
    det.backaction_kick = require_number(obj, where, "backaction_kick", det.backaction_kick);
    detectors::validate(det);
    return det;
  }
  if (type == "molecule") {
    check_keys(obj, where, {"type", "alpha", "beta", "overlap_c", "mol_dim", "seed"});
    detectors::MoleculeDetector det;
    det.alpha = require_number(obj, where, "alpha", det.alpha);
    det.beta = require_number(obj, where, "beta", det.beta);
    det.overlap_c = require_number(obj, where, "overlap_c", det.overlap_c);
    det.mol_dim = static_cast<std::size_t>(require_uint(obj, where, "mol_dim", det.mol_dim));
    det.seed = require_uint(obj, where, "seed", det.seed);
    detectors::validate(det);
    return det;
  }
  if (type == "bolometer") {
    check_keys(obj, where,
               {"type", "n_molecules", "p_hit", "mol_dim", "ext_dim", "ext_overlap_kappa",
                "seed"});
    detectors::Bolometer det;
    det.n_molecules =
        static_cast<std::size_t>(require_uint(obj, where, "n_molecules", det.n_molecules));
    det.p_hit = require_number(obj, where, "p_hit", det.p_hit);
    det.mol_dim = static_cast<std::size_t>(require_uint(obj, where, "mol_dim", det.mol_dim));
    det.ext_dim = static_cast<std::size_t>(require_uint(obj, where, "ext_dim", det.ext_dim));
    det.ext_overlap_kappa =
        require_number(obj, where, "ext_overlap_kappa", det.ext_overlap_kappa);
    det.seed = require_uint(obj, where, "seed", det.seed);
    detectors::validate(det);
    return det;
  }
  throw ConfigError(where + ": unknown detector type '" + type + "'");
}

const std::map<std::string, std::string>& builtin_texts() {
  static const std::map<std::string, std::string> texts = {
      {"fig1a", R"({
  "name": "fig1a",
  "description": "bare interferometer, nothing inserted; full-contrast fringes"
})"},
      {"fig1b", R"({
  "name": "fig1b",
  "description": "qubit register on the right arm; which-path and +/- readouts",
  "detector": {"type": "qubit", "efficiency": 1.0, "backaction_kick": 0.0},
  "readout": {"theta": 1.5707963267948966, "phi": 0.0}
})"},
      {"fig1c", R"({
  "name": "fig1c",
  "description": "single gas molecule in the right arm; inefficient which-path detector",
  "detector": {"type": "molecule", "alpha": 0.31622776601683794,
               "beta": 0.94868329805051381, "overlap_c": 0.0, "mol_dim": 4, "seed": 7}
})"},
      {"fig1d", R"({
  "name": "fig1d",
  "description": "bolometer gas volume; fully efficient which-path detector, no fringes anywhere",
  "detector": {"type": "bolometer", "n_molecules": 8, "p_hit": 1.0, "mol_dim": 2,
               "ext_dim": 0, "ext_overlap_kappa": 0.0, "seed": 11}
})"},
      {"eraser", R"({
  "name": "eraser",
  "description": "qubit read out in the +/- basis; conditional fringes recovered",
  "detector": {"type": "qubit", "efficiency": 1.0, "backaction_kick": 0.0},
  "readout": {"theta": 1.5707963267948966, "phi": 0.0}
})"},
      {"born", R"({
  "name": "born",
  "description": "imbalanced 1:99 paths into a bolometer with arrow and cat; Born-weight sampling",
  "atom": {"amp_left": [0.1, 0.0], "amp_right": [0.99498743710661997, 0.0]},
  "detector": {"type": "bolometer", "n_molecules": 8, "p_hit": 0.99, "mol_dim": 2,
               "ext_dim": 0, "ext_overlap_kappa": 0.0, "seed": 13},
  "observers": {"attach_arrow_cat": true, "eyes_closed": false},
  "sampling": {"trials": 100000, "seed": 42}
})"},
      {"eyes-closed", R"({
  "name": "eyes-closed",
  "description": "born setup with the cat's eyes closed; self-locating probabilities before looking",
  "atom": {"amp_left": [0.1, 0.0], "amp_right": [0.99498743710661997, 0.0]},
  "detector": {"type": "bolometer", "n_molecules": 8, "p_hit": 0.99, "mol_dim": 2,
               "ext_dim": 0, "ext_overlap_kappa": 0.0, "seed": 13},
  "observers": {"attach_arrow_cat": true, "eyes_closed": true},
  "sampling": {"trials": 100000, "seed": 42}
})"},
      {"bell", R"({
  "name": "bell",
  "description": "singlet pair measured by two parties; correlations and no-signaling audit",
  "bell": {"remote_axes": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
           "local_axis": [0, 0, 1], "order": "both"}
})"},
  };
  return texts;
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ":" + std::to_string(line_of_byte(text, e.byte)) +
                      ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError(origin + ": scenario must be a JSON object");

  check_keys(doc, origin,
             {"name", "description", "geometry", "grid", "atom", "detector", "readout",
              "observers", "sampling", "bell"});

  Scenario s;
  s.name = doc.contains("name") ? doc["name"].get<std::string>() : "unnamed";
  s.description = doc.contains("description") ? doc["description"].get<std::string>() : "";

  if (doc.contains("geometry")) {
    const json& g = doc["geometry"];
    const std::string where = origin + ": geometry";
    check_keys(g, where, {"separation", "zeta"});
    s.geometry.separation = require_number(g, where, "separation", s.geometry.separation);
    s.geometry.zeta = require_number(g, where, "zeta", s.geometry.zeta);
    if (!(s.geometry.separation > 0.0)) throw ConfigError(where + ": separation must be > 0");
    if (!(s.geometry.zeta >= 0.0)) throw ConfigError(where + ": zeta must be >= 0");
  }

  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    const std::string where = origin + ": grid";
    check_keys(g, where, {"x_min", "x_max", "n"});
    s.grid.x_min = require_number(g, where, "x_min", s.grid.x_min);
    s.grid.x_max = require_number(g, where, "x_max", s.grid.x_max);
    s.grid.n = static_cast<std::size_t>(require_uint(g, where, "n", s.grid.n));
    if (!(s.grid.x_min < s.grid.x_max)) throw ConfigError(where + ": requires x_min < x_max");
    if (s.grid.n < 2) throw ConfigError(where + ": requires n >= 2");
  }

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  s.amp_left = hilbert::cplx{inv_sqrt2, 0.0};
  s.amp_right = hilbert::cplx{inv_sqrt2, 0.0};
  if (doc.contains("atom")) {
    const json& a = doc["atom"];
    const std::string where = origin + ": atom";
    check_keys(a, where, {"amp_left", "amp_right"});
    if (a.contains("amp_left")) s.amp_left = parse_amp(a["amp_left"], where);
    if (a.contains("amp_right")) s.amp_right = parse_amp(a["amp_right"], where);
  }
  const double total = std::norm(s.amp_left) + std::norm(s.amp_right);
  if (std::abs(total - 1.0) > 1e-9)
    throw ConfigError(origin + ": atom amplitudes must satisfy |aL|^2 + |aR|^2 = 1");

  if (doc.contains("detector") && !doc["detector"].is_null())
    s.detector = parse_detector(doc["detector"], origin + ": detector");

  if (doc.contains("readout")) {
    const json& r = doc["readout"];
    const std::string where = origin + ": readout";
    check_keys(r, where, {"theta", "phi"});
    detectors::ReadoutBasis basis;
    basis.theta = require_number(r, where, "theta", 0.0);
    basis.phi = require_number(r, where, "phi", 0.0);
    s.readout = basis;
    if (!std::holds_alternative<detectors::QubitDetector>(s.detector))
      throw ConfigError(origin + ": readout basis requires a qubit detector");
  }

  if (doc.contains("observers")) {
    const json& o = doc["observers"];
    const std::string where = origin + ": observers";
    check_keys(o, where, {"attach_arrow_cat", "eyes_closed"});
    if (o.contains("attach_arrow_cat")) s.observers.attach_arrow_cat = o["attach_arrow_cat"].get<bool>();
    if (o.contains("eyes_closed")) s.observers.eyes_closed = o["eyes_closed"].get<bool>();
    if (s.observers.eyes_closed && !s.observers.attach_arrow_cat)
      throw ConfigError(where + ": eyes_closed requires attach_arrow_cat");
    if (s.observers.attach_arrow_cat &&
        !std::holds_alternative<detectors::Bolometer>(s.detector))
      throw ConfigError(where + ": observer chain requires a bolometer detector");
  }

  if (doc.contains("sampling")) {
    const json& sm = doc["sampling"];
    const std::string where = origin + ": sampling";
    check_keys(sm, where, {"trials", "seed"});
    s.sampling.trials = require_uint(sm, where, "trials", s.sampling.trials);
    s.sampling.seed = require_uint(sm, where, "seed", s.sampling.seed);
    if (s.sampling.trials > 0 && !s.has_detector())
      throw ConfigError(where + ": sampling requires a detector to branch on");
  }

  if (doc.contains("bell")) {
    const json& b = doc["bell"];
    const std::string where = origin + ": bell";
    check_keys(b, where, {"remote_axes", "local_axis", "order"});
    BellOptions opt;
    if (!b.contains("remote_axes") || !b["remote_axes"].is_array() || b["remote_axes"].empty())
      throw ConfigError(where + ": remote_axes must be a nonempty array");
    for (const auto& axis : b["remote_axes"]) opt.remote_axes.push_back(parse_axis(axis, where));
    if (b.contains("local_axis")) opt.local_axis = parse_axis(b["local_axis"], where);
    if (b.contains("order")) {
      const std::string order = b["order"].get<std::string>();
      if (order == "remote-first")
        opt.order = BellOrder::RemoteFirst;
      else if (order == "local-first")
        opt.order = BellOrder::LocalFirst;
      else if (order == "both")
        opt.order = BellOrder::Both;
      else
        throw ConfigError(where + ": order must be remote-first, local-first, or both");
    }
    s.bell = std::move(opt);
  }

  return s;
}

bool is_builtin(const std::string& name) { return builtin_texts().contains(name); }

Scenario builtin_scenario(const std::string& name) {
  const auto& texts = builtin_texts();
  const auto it = texts.find(name);
  if (it == texts.end()) throw ConfigError("unknown built-in scenario '" + name + "'");
  return parse_scenario(it->second, "builtin:" + name);
}

Scenario load_scenario(const std::string& path_or_name) {
  if (is_builtin(path_or_name)) return builtin_scenario(path_or_name);
  std::ifstream in(path_or_name);
  if (!in) throw ConfigError("no built-in scenario or readable file named '" + path_or_name + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), path_or_name);
}

std::vector<std::pair<std::string, std::string>> list_scenarios() {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [name, text] : builtin_texts()) {
    const Scenario s = parse_scenario(text, "builtin:" + name);
    out.emplace_back(name, s.description);
  }
  return out;
}

}  // namespace whichpath::cli
