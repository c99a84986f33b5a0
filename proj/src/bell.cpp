// SPDX-License-Identifier: Apache-2.0
#include "whichpath/bell.hpp"

#include <cmath>

#include "whichpath/errors.hpp"

namespace whichpath::bell {
namespace {

constexpr std::string_view kYouSpin = "you";
constexpr std::string_view kMeSpin = "me";
constexpr std::string_view kYouObs = "you-obs";
constexpr std::string_view kMeObs = "me-obs";

std::string_view spin_factor(Party p) { return p == Party::You ? kYouSpin : kMeSpin; }
std::string_view obs_factor(Party p) { return p == Party::You ? kYouObs : kMeObs; }

// Spin-1/2 eigenstates along the axis: column 0 is +, column 1 is -.
std::array<std::array<cplx, 2>, 2> spin_eigenstates(const MeasurementAxis& n) {
  const double theta = std::acos(std::clamp(n.z, -1.0, 1.0));
  const double phi = std::atan2(n.y, n.x);
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  const cplx ph{std::cos(phi), std::sin(phi)};
  return {{{cplx{c, 0.0}, s * ph}, {-s * std::conj(ph), cplx{c, 0.0}}}};
}

}  // namespace

MeasurementAxis::MeasurementAxis(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {
  const double n = std::sqrt(x * x + y * y + z * z);
  if (n < 1e-12) throw ConfigError("measurement axis must be a nonzero vector");
  x /= n;
  y /= n;
  z /= n;
}

bool TwoPartyState::measured(Party party) const {
  for (const auto& [p, axis] : event_log)
    if (p == party) return true;
  return false;
}

TwoPartyState singlet() {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  std::vector<cplx> spins(4, cplx{0.0, 0.0});
  spins[0b01] = cplx{inv_sqrt2, 0.0};   // ⇑⇓
  spins[0b10] = cplx{-inv_sqrt2, 0.0};  // ⇓⇑
  StateVector pair({{std::string(kYouSpin), 2}, {std::string(kMeSpin), 2}}, std::move(spins));

  TwoPartyState s;
  s.psi = hilbert::tensor(hilbert::tensor(pair, StateVector::basis({std::string(kYouObs), 2}, 0)),
                          StateVector::basis({std::string(kMeObs), 2}, 0));
  return s;
}

TwoPartyState measure_local(const TwoPartyState& s, Party party, const MeasurementAxis& axis) {
  if (s.measured(party)) throw UsageError("party has already measured its spin");

  const auto eig = spin_eigenstates(axis);
  // Projectors onto the axis eigenstates; outcome - also flips the observer
  // register, so the record states are orthogonal and the whole map unitary.
  std::array<cplx, 4> proj_up{};
  std::array<cplx, 4> proj_down{};
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      proj_up[i * 2 + j] = eig[0][i] * std::conj(eig[0][j]);
      proj_down[i * 2 + j] = eig[1][i] * std::conj(eig[1][j]);
    }
  }
  const std::array<cplx, 4> flip{cplx{0, 0}, cplx{1, 0}, cplx{1, 0}, cplx{0, 0}};

  TwoPartyState out;
  out.psi = hilbert::apply_to_factor(s.psi, spin_factor(party), proj_up);
  StateVector down = hilbert::apply_to_factor(s.psi, spin_factor(party), proj_down);
  down = hilbert::apply_to_factor(down, obs_factor(party), flip);
  out.psi += down;
  out.event_log = s.event_log;
  out.event_log.emplace_back(party, axis);
  return out;
}

std::array<double, 2> local_marginal(const TwoPartyState& s, Party party) {
  if (!s.measured(party)) throw UsageError("party has not measured yet");
  const std::array<std::string, 1> keep = {std::string(obs_factor(party))};
  const hilbert::DensityMatrix rho = hilbert::partial_trace(s.psi, keep);
  return {rho(0, 0).real(), rho(1, 1).real()};
}

std::array<std::array<double, 2>, 2> joint_weights(const TwoPartyState& s) {
  if (!s.measured(Party::You) || !s.measured(Party::Me))
    throw UsageError("both parties must measure before reading joint weights");
  std::array<std::array<double, 2>, 2> w{};
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t b = 0; b < 2; ++b) {
      const StateVector outcome =
          hilbert::tensor(StateVector::basis({std::string(kYouObs), 2}, a),
                          StateVector::basis({std::string(kMeObs), 2}, b));
      const double n = hilbert::contract(s.psi, outcome).norm();
      w[a][b] = n * n;
    }
  }
  return w;
}

JointStatistics joint_statistics(const MeasurementAxis& a, const MeasurementAxis& b) {
  TwoPartyState s = singlet();
  s = measure_local(s, Party::You, a);
  s = measure_local(s, Party::Me, b);
  JointStatistics out;
  out.probabilities = joint_weights(s);
  out.correlation = out.probabilities[0][0] - out.probabilities[0][1] -
                    out.probabilities[1][0] + out.probabilities[1][1];
  return out;
}

double no_signaling_check(std::span<const MeasurementAxis> remote_axes,
                          const MeasurementAxis& local_axis, Order order) {
  if (remote_axes.empty()) throw ConfigError("no_signaling_check requires at least one axis");
  double worst = 0.0;
  for (const MeasurementAxis& remote : remote_axes) {
    TwoPartyState s = singlet();
    if (order == Order::RemoteFirst) {
      s = measure_local(s, Party::You, remote);
      s = measure_local(s, Party::Me, local_axis);
    } else {
      s = measure_local(s, Party::Me, local_axis);
      s = measure_local(s, Party::You, remote);
    }
    const auto marginal = local_marginal(s, Party::Me);
    worst = std::max(worst, std::abs(marginal[0] - 0.5));
    worst = std::max(worst, std::abs(marginal[1] - 0.5));
  }
  return worst;
}

double chsh(const MeasurementAxis& a1, const MeasurementAxis& a2, const MeasurementAxis& b1,
            const MeasurementAxis& b2) {
  return joint_statistics(a1, b1).correlation + joint_statistics(a1, b2).correlation +
         joint_statistics(a2, b1).correlation - joint_statistics(a2, b2).correlation;
}

}  // namespace whichpath::bell
