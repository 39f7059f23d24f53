#pragma once

#include <utility>

#include "krc/potentials.hpp"
#include "krc/stability.hpp"
#include "krc/torus.hpp"

namespace krc {

/// One full step of the controlled map: kick with the full-step potential,
/// half free flight, kick with the half-step potential, half free flight.
/// Returns the intermediate (n+1/2) point and the final (n+1) point.
/// On the control orbit this reproduces the standard map exactly.
inline std::pair<PhasePoint, PhasePoint> controlled_map_step(const PhasePoint& x,
                                                             const PhasePoint& orbit_full,
                                                             const PhasePoint& orbit_half,
                                                             ControlScheme scheme,
                                                             const KickedRotorParams& params) {
  if (!has_designed_potential(scheme))
    throw config_error("controlled_map_step: scheme has no designed potential");
  KickPotential vf{scheme, KickTiming::Full, orbit_full.q_unreduced(), params};
  KickPotential vh{scheme, KickTiming::Half, orbit_half.q_unreduced(), params};

  PhasePoint half = x;
  half.p = x.p - potential_derivatives(vf, x.q_unreduced()).first;
  half.wind_p += reduce_wind(half.p, params.S);
  half.q = x.q + half.p / 2.0;
  half.wind_q += reduce_wind(half.q, 1.0);

  PhasePoint full = half;
  full.p = half.p - potential_derivatives(vh, half.q_unreduced()).first;
  full.wind_p += reduce_wind(full.p, params.S);
  full.q = half.q + full.p / 2.0;
  full.wind_q += reduce_wind(full.q, 1.0);
  return {half, full};
}

/// Single-step stability matrix of the controlled map, the product of the
/// two half-step matrices
///   M_half = M_f(1/2) M_K(V'')
/// with V'' evaluated at the actual trajectory points x_n and x_{n+1/2}.
/// On-orbit this is the fixed rotation of the scheme (53 degrees for SolA,
/// pi for SolB).
inline StabilityMatrix stability_step_controlled(const PhasePoint& x_n,
                                                 const PhasePoint& x_half,
                                                 const PhasePoint& orbit_full,
                                                 const PhasePoint& orbit_half,
                                                 ControlScheme scheme,
                                                 const KickedRotorParams& params) {
  if (!has_designed_potential(scheme))
    throw config_error("stability_step_controlled: scheme has no designed potential");
  KickPotential vf{scheme, KickTiming::Full, orbit_full.q_unreduced(), params};
  KickPotential vh{scheme, KickTiming::Half, orbit_half.q_unreduced(), params};
  double c1 = potential_derivatives(vf, x_n.q_unreduced()).second;
  double c2 = potential_derivatives(vh, x_half.q_unreduced()).second;
  StabilityMatrix m1 = flight_matrix(0.5) * kick_matrix(c1);
  StabilityMatrix m2 = flight_matrix(0.5) * kick_matrix(c2);
  return m2 * m1;
}

}  // namespace krc
