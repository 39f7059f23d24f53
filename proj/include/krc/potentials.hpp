#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>

#include "krc/control_scheme.hpp"
#include "krc/standard_map.hpp"
#include "krc/torus.hpp"

namespace krc {

/// Kick timing within one period: the strong kick at integer times, the weak
/// one halfway between.
enum class KickTiming { Full, Half };

/// One control kick potential V(q), periodic in q with period 1, centered on
/// an orbit point q_c. The closed forms per scheme:
///
///   SolA  full:  (K/4pi^2) sin(2pi q_c) sin th            th = 2pi (q - q_c)
///   SolA  half:  -(1/5pi^2) cos th
///   SolB  full:  -(1/pi^2) cos th + (K sin(2pi q_c)/4pi^2) sin th
///   SolB  half:  -(1/pi^2) cos th
///
/// The Improved variants replace sin th by (4/3)[sin th - (1/8) sin 2th] in
/// the odd part of the full-step potential, which cancels the linear term of
/// V'' about q_c while leaving V' and V'' at q_c unchanged. Half-step
/// potentials are even about their center and need no correction.
struct KickPotential {
  ControlScheme scheme = ControlScheme::SolA;
  KickTiming timing = KickTiming::Full;
  double center = 0.0;  ///< q_gamma(n) or q_gamma(n+1/2), any branch
  KickedRotorParams params;

  void validate() const {
    if (!has_designed_potential(scheme))
      throw config_error("scheme has no designed kick potential: " +
                         std::string(to_string(scheme)));
    params.validate();
  }
};

namespace detail {
inline constexpr double kPi = std::numbers::pi;

struct PotEval {
  double value, d1, d2;
};

inline PotEval eval_potential(const KickPotential& pot, double q) {
  const double K = pot.params.K;
  const double th = kTwoPi * (q - pot.center);
  const double s = std::sin(th), c = std::cos(th);
  const double s2 = std::sin(2.0 * th), c2 = std::cos(2.0 * th);
  const double sg = std::sin(kTwoPi * pot.center);

  if (pot.timing == KickTiming::Half) {
    // -(a/4pi^2) cos th with a = 4/5 (SolA family) or 4 (SolB family)
    double a = (pot.scheme == ControlScheme::SolA || pot.scheme == ControlScheme::SolAImproved)
                   ? 0.8
                   : 4.0;
    return {-a / (4.0 * kPi * kPi) * c, a / (2.0 * kPi) * s, a * c};
  }

  bool improved =
      pot.scheme == ControlScheme::SolAImproved || pot.scheme == ControlScheme::SolBImproved;
  // odd part shared by both solutions: (K sg/4pi^2) * f(th)
  double f, f1, f2;  // f and derivatives w.r.t. q of the bracketed factor
  if (improved) {
    f = (4.0 / 3.0) * (s - s2 / 8.0);
    f1 = (4.0 / 3.0) * kTwoPi * (c - c2 / 4.0);
    f2 = -(4.0 / 3.0) * kTwoPi * kTwoPi * (s - s2 / 2.0);
  } else {
    f = s;
    f1 = kTwoPi * c;
    f2 = -kTwoPi * kTwoPi * s;
  }
  double amp = K * sg / (4.0 * kPi * kPi);
  PotEval e{amp * f, amp * f1, amp * f2};
  if (pot.scheme == ControlScheme::SolB || pot.scheme == ControlScheme::SolBImproved) {
    // even part -(1/pi^2) cos th carries the V'' = 4 stability constraint
    e.value += -1.0 / (kPi * kPi) * c;
    e.d1 += 2.0 / kPi * s;
    e.d2 += 4.0 * c;
  }
  return e;
}
}  // namespace detail

inline double potential_value(const KickPotential& pot, double q) {
  pot.validate();
  return detail::eval_potential(pot, q).value;
}

/// Analytic first and second derivatives.
inline std::pair<double, double> potential_derivatives(const KickPotential& pot, double q) {
  pot.validate();
  auto e = detail::eval_potential(pot, q);
  return {e.d1, e.d2};
}

/// The SolB full-step potential written as a single phase-shifted cosine,
///   -(K(n)/4pi^2) cos(th + phi),  K(n) = K sqrt(16/K^2 + sin^2 2pi q_c),
/// with phi from the quadrant-correct two-argument arctangent of
/// (sin 2pi q_c, 4/K). Identical to the two-term form for all q.
inline double solution_b_compact(double q, double center, double K) {
  double sg = std::sin(kTwoPi * center);
  double Kn = K * std::sqrt(16.0 / (K * K) + sg * sg);
  double phi = std::atan2(sg, 4.0 / K);
  return -Kn / (4.0 * detail::kPi * detail::kPi) * std::cos(kTwoPi * (q - center) + phi);
}

/// Original kicked-rotor kick potential V0(q) = -(K/4pi^2) cos(2pi q).
inline double base_kick_potential(double q, double K) {
  return -K / (4.0 * detail::kPi * detail::kPi) * std::cos(kTwoPi * q);
}
inline double base_kick_impulse(double q, double K) {  // V0'(q)
  return K / kTwoPi * std::sin(kTwoPi * q);
}
inline double base_kick_curvature(double q, double K) {  // V0''(q)
  return K * std::cos(kTwoPi * q);
}

/// Constraint check of the control potentials along an orbit: V' must
/// reproduce the original kick impulse at each q_gamma(n), the half-step
/// slope must vanish at q_gamma(n+1/2), and the second derivatives must sit
/// on the scheme's constraint table (0 and 4/5 for SolA, 4 and 4 for SolB).
struct ConstraintReport {
  double max_dev_impulse = 0.0;      ///< |V' - (K/2pi) sin 2pi q_c| at centers
  double max_dev_half_slope = 0.0;   ///< |V_half'| at half centers
  double max_dev_full_curv = 0.0;    ///< |V'' - table| at centers
  double max_dev_half_curv = 0.0;    ///< |V_half'' - table| at half centers
  double max_deviation() const {
    return std::max({max_dev_impulse, max_dev_half_slope, max_dev_full_curv, max_dev_half_curv});
  }
};

inline ConstraintReport verify_constraints(std::span<const double> q_full,
                                           std::span<const double> q_half,
                                           ControlScheme scheme,
                                           const KickedRotorParams& params) {
  if (!has_designed_potential(scheme))
    throw config_error("verify_constraints: scheme has no designed potential");
  bool sol_a = scheme == ControlScheme::SolA || scheme == ControlScheme::SolAImproved;
  double full_curv_target = sol_a ? 0.0 : 4.0;
  double half_curv_target = sol_a ? 0.8 : 4.0;
  ConstraintReport r;
  for (double qc : q_full) {
    KickPotential pot{scheme, KickTiming::Full, qc, params};
    auto [d1, d2] = potential_derivatives(pot, qc);
    r.max_dev_impulse = std::max(r.max_dev_impulse, std::abs(d1 - base_kick_impulse(qc, params.K)));
    r.max_dev_full_curv = std::max(r.max_dev_full_curv, std::abs(d2 - full_curv_target));
  }
  for (double qc : q_half) {
    KickPotential pot{scheme, KickTiming::Half, qc, params};
    auto [d1, d2] = potential_derivatives(pot, qc);
    r.max_dev_half_slope = std::max(r.max_dev_half_slope, std::abs(d1));
    r.max_dev_half_curv = std::max(r.max_dev_half_curv, std::abs(d2 - half_curv_target));
  }
  return r;
}

}  // namespace krc
