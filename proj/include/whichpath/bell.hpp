// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "whichpath/hilbert.hpp"

namespace whichpath::bell {

using hilbert::cplx;
using hilbert::StateVector;

/// Unit 3-vector measurement setting. Constructed normalized.
struct MeasurementAxis {
  double x = 0.0;
  double y = 0.0;
  double z = 1.0;

  MeasurementAxis() = default;
  MeasurementAxis(double x, double y, double z);

  double dot(const MeasurementAxis& other) const {
    return x * other.x + y * other.y + z * other.z;
  }
};

enum class Party { You, Me };
enum class Order { RemoteFirst, LocalFirst };

/// Singlet pair plus one observer register per party. Measurements entangle
/// records instead of projecting, so the full history stays in the state.
struct TwoPartyState {
  StateVector psi;
  std::vector<std::pair<Party, MeasurementAxis>> event_log;

  bool measured(Party party) const;
};

/// (|⇑⇓⟩ - |⇓⇑⟩)/sqrt(2) with both observers in their ready states.
TwoPartyState singlet();

/// Entangles the party's spin eigenstates along `axis` with that party's
/// observer register (a unitary record isometry; no amplitude is zeroed).
TwoPartyState measure_local(const TwoPartyState& s, Party party, const MeasurementAxis& axis);

/// Marginal outcome distribution (P_up, P_down) of a party that has measured,
/// read from the full state.
std::array<double, 2> local_marginal(const TwoPartyState& s, Party party);

/// Joint outcome weights after both parties measured: probs[a][b] with
/// a, b in {0 = up, 1 = down}.
std::array<std::array<double, 2>, 2> joint_weights(const TwoPartyState& s);

struct JointStatistics {
  std::array<std::array<double, 2>, 2> probabilities;  ///< [you][me], 0 = up
  double correlation;                                  ///< E = sum s_a s_b P(s_a, s_b)
};

/// Measures a fresh singlet along (a, b) and tabulates outcome statistics
/// numerically from the state. Closed form (1 - s_a s_b a.b)/4 is the oracle.
JointStatistics joint_statistics(const MeasurementAxis& a, const MeasurementAxis& b);

/// Max |P(local outcome) - 1/2| over every remote setting, with the given
/// measurement order. Local party is Me, remote is You.
double no_signaling_check(std::span<const MeasurementAxis> remote_axes,
                          const MeasurementAxis& local_axis, Order order);

/// S = E(a1,b1) + E(a1,b2) + E(a2,b1) - E(a2,b2).
double chsh(const MeasurementAxis& a1, const MeasurementAxis& a2, const MeasurementAxis& b1,
            const MeasurementAxis& b2);

}  // namespace whichpath::bell
