// SPDX-License-Identifier: Apache-2.0
#include "whichpath/optics.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "whichpath/errors.hpp"
#include "whichpath/factors.hpp"

namespace whichpath::optics {
namespace {

void validate(const SlitGeometry& geom) {
  if (!(geom.separation > 0.0)) throw ConfigError("slit separation must be positive");
  if (!(geom.zeta >= 0.0)) throw ConfigError("propagation distance must be nonnegative");
}

void validate(const ScreenGrid& grid) {
  if (!(grid.x_min < grid.x_max)) throw ConfigError("screen grid requires x_min < x_max");
  if (grid.n < 2) throw ConfigError("screen grid requires at least 2 points");
}

}  // namespace

// Scale each path to unit grid integral of its intensity, so single-path
// envelopes are probability densities and pattern weights are Born weights.
UnitPaths unit_normalized_paths(const PathField& field) {
  const double dx = field.grid.dx();
  double nl = 0.0;
  double nr = 0.0;
  for (const cplx& a : field.psi_left) nl += std::norm(a);
  for (const cplx& a : field.psi_right) nr += std::norm(a);
  nl *= dx;
  nr *= dx;
  if (nl <= 0.0 || nr <= 0.0) throw ConfigError("path field has zero intensity on the grid");

  UnitPaths out;
  out.left.resize(field.psi_left.size());
  out.right.resize(field.psi_right.size());
  const double il = 1.0 / std::sqrt(nl);
  const double ir = 1.0 / std::sqrt(nr);
  for (std::size_t i = 0; i < out.left.size(); ++i) out.left[i] = field.psi_left[i] * il;
  for (std::size_t i = 0; i < out.right.size(); ++i) out.right[i] = field.psi_right[i] * ir;
  return out;
}

namespace {

struct PathMatrix {
  double ll = 0.0;
  double rr = 0.0;
  cplx lr{0.0, 0.0};  // sum over the rest of amp(L,*) * conj(amp(R,*))
};

PathMatrix reduced_path_matrix(const StateVector& joint) {
  const std::array<std::string, 1> keep = {std::string(factors::kAtomPath)};
  const hilbert::DensityMatrix rho = hilbert::partial_trace(joint, keep);
  if (rho.dim() != 2) throw ConfigError("atom-path factor must have dimension 2");
  return {rho(0, 0).real(), rho(1, 1).real(), rho(0, 1)};
}

// Unnormalized density and baseline for a (possibly non-unit-trace) path
// matrix; the interference term is exactly density - baseline.
void assemble(const UnitPaths& f, const PathMatrix& rho, std::vector<double>& density,
              std::vector<double>& baseline) {
  const std::size_t n = f.left.size();
  density.resize(n);
  baseline.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double il = std::norm(f.left[i]);
    const double ir = std::norm(f.right[i]);
    const double base = rho.ll * il + rho.rr * ir;
    const double cross = 2.0 * (rho.lr * f.left[i] * std::conj(f.right[i])).real();
    baseline[i] = base;
    density[i] = base + cross;
  }
}

double grid_integral(const std::vector<double>& values, double dx) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum * dx;
}

void scale(std::vector<double>& values, double factor) {
  for (double& v : values) v *= factor;
}

}  // namespace

PathField gaussian_slit_field(const SlitGeometry& geom, const ScreenGrid& grid) {
  validate(geom);
  validate(grid);

  PathField field;
  field.grid = grid;
  field.psi_left.resize(grid.n);
  field.psi_right.resize(grid.n);

  const double s2 = 1.0 + geom.zeta * geom.zeta;
  const double half = 0.5 * geom.separation;
  // exp(-u^2 / (2 (1 + i zeta))) = exp(-u^2 (1 - i zeta) / (2 (1 + zeta^2)))
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double x = grid.x(i);
    const double ul = x + half;
    const double ur = x - half;
    const double ql = ul * ul / (2.0 * s2);
    const double qr = ur * ur / (2.0 * s2);
    field.psi_left[i] = std::exp(-ql) * cplx{std::cos(geom.zeta * ql), std::sin(geom.zeta * ql)};
    field.psi_right[i] = std::exp(-qr) * cplx{std::cos(geom.zeta * qr), std::sin(geom.zeta * qr)};
  }
  return field;
}

void apply_backaction_kick(PathField& field, double kick) {
  if (kick == 0.0) return;
  for (std::size_t i = 0; i < field.grid.n; ++i) {
    const double x = field.grid.x(i);
    field.psi_right[i] *= cplx{std::cos(kick * x), std::sin(kick * x)};
  }
}

ScreenPattern pattern_pure(const PathField& field, cplx left, cplx right, std::string label) {
  const double total = std::norm(left) + std::norm(right);
  if (std::abs(total - 1.0) > 1e-9)
    throw ConfigError("pattern_pure requires |cL|^2 + |cR|^2 = 1");

  const UnitPaths f = unit_normalized_paths(field);
  ScreenPattern p;
  p.grid = field.grid;
  p.label = std::move(label);
  const PathMatrix rho{std::norm(left), std::norm(right), left * std::conj(right)};
  assemble(f, rho, p.density, p.baseline);

  const double z = grid_integral(p.density, field.grid.dx());
  if (z <= 0.0) throw ConfigError("pattern has zero integral");
  scale(p.density, 1.0 / z);
  scale(p.baseline, 1.0 / z);
  return p;
}

ScreenPattern pattern_ignore(const PathField& field, const StateVector& joint,
                             std::string label) {
  const UnitPaths f = unit_normalized_paths(field);
  const PathMatrix rho = reduced_path_matrix(joint);

  ScreenPattern p;
  p.grid = field.grid;
  p.label = std::move(label);
  assemble(f, rho, p.density, p.baseline);

  const double z = grid_integral(p.density, field.grid.dx());
  if (z <= 0.0) throw ConfigError("pattern has zero integral");
  scale(p.density, 1.0 / z);
  scale(p.baseline, 1.0 / z);
  return p;
}

ScreenPattern pattern_conditional(const PathField& field, const StateVector& joint,
                                  const StateVector& outcome, std::string label) {
  if (outcome.has_factor(factors::kAtomPath))
    throw ConfigError("detector outcome must not include the atom-path factor");
  joint.factor_position(factors::kAtomPath);  // validates presence

  const UnitPaths f = unit_normalized_paths(field);

  // Common normalization from the ignored pattern, so a complete set of
  // outcomes sums pointwise to pattern_ignore and each conditional pattern
  // integrates to (approximately) its Born weight.
  const PathMatrix rho_all = reduced_path_matrix(joint);
  std::vector<double> ignored_density;
  std::vector<double> ignored_baseline;
  assemble(f, rho_all, ignored_density, ignored_baseline);
  const double z = grid_integral(ignored_density, field.grid.dx());
  if (z <= 0.0) throw ConfigError("pattern has zero integral");

  const StateVector projected = hilbert::contract(joint, outcome);
  const PathMatrix rho = reduced_path_matrix(projected);

  ScreenPattern p;
  p.grid = field.grid;
  p.label = std::move(label);
  assemble(f, rho, p.density, p.baseline);
  scale(p.density, 1.0 / z);
  scale(p.baseline, 1.0 / z);
  return p;
}

double fringe_visibility(const ScreenPattern& pattern, double window) {
  if (pattern.baseline.size() != pattern.density.size())
    throw ConfigError("pattern is missing its baseline");

  std::size_t points = 0;
  double peak = 0.0;
  for (std::size_t i = 0; i < pattern.density.size(); ++i) {
    if (std::abs(pattern.grid.x(i)) > window) continue;
    ++points;
    const double base = pattern.baseline[i];
    if (base < 1e-300) continue;  // no envelope here, no fringe to read
    peak = std::max(peak, std::abs(pattern.density[i] - base) / base);
  }
  if (points < 2) throw ConfigError("visibility window covers fewer than 2 grid points");
  return peak;
}

double coherence_visibility(const StateVector& joint) {
  const PathMatrix rho = reduced_path_matrix(joint);
  const double trace = rho.ll + rho.rr;
  if (trace < 1e-300) return 0.0;
  return 2.0 * std::abs(rho.lr) / trace;
}

void write_csv(std::ostream& out, std::span<const ScreenPattern> patterns) {
  out << "x,density,label\n";
  char buf[64];
  for (const ScreenPattern& p : patterns) {
    for (std::size_t i = 0; i < p.density.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", p.grid.x(i));
      out << buf << ',';
      std::snprintf(buf, sizeof(buf), "%.17g", p.density[i]);
      out << buf << ',' << p.label << '\n';
    }
  }
}

nlohmann::json to_json(const ScreenPattern& pattern) {
  nlohmann::json j;
  j["label"] = pattern.label;
  j["x"] = nlohmann::json::array();
  j["density"] = nlohmann::json::array();
  for (std::size_t i = 0; i < pattern.density.size(); ++i) {
    j["x"].push_back(pattern.grid.x(i));
    j["density"].push_back(pattern.density[i]);
  }
  return j;
}

}  // namespace whichpath::optics
