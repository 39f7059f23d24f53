#pragma once

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "krc/potentials.hpp"
#include "krc/standard_map.hpp"
#include "krc/torus.hpp"

namespace krc {

/// A finite connecting orbit of the standard map plus everything the control
/// construction needs: the full-step points x(0..tau), the half-step points
/// x(1/2 .. tau-1/2) of the controlled dynamics, and the entry/exit shift
/// distances to the fixed-point centroids.
struct ControlOrbit {
  double K = 8.0;
  int tau = 0;
  std::vector<PhasePoint> points_full;  ///< tau+1 points, winding tracked
  std::vector<PhasePoint> points_half;  ///< tau points at n+1/2
  double shift_in = 0.0;
  double shift_out = 0.0;

  const PhasePoint& at(int n) const { return points_full.at(static_cast<size_t>(n)); }
  const PhasePoint& at_half(int n) const { return points_half.at(static_cast<size_t>(n)); }
};

/// Iterate tau steps from x0 and assemble the orbit. Half-step points follow
/// from the controlled map's first half on-orbit: p(n+1/2) = p(n+1) and
/// q(n+1/2) = q(n) + p(n+1)/2 (midpoint of unreduced positions).
inline ControlOrbit build_orbit(const PhasePoint& x0, int tau, const KickedRotorParams& params,
                                const PhasePoint& alpha, const PhasePoint& beta) {
  ControlOrbit orb;
  orb.K = params.K;
  orb.tau = tau;
  orb.points_full.reserve(static_cast<size_t>(tau) + 1);
  orb.points_full.push_back(x0);
  for (int n = 0; n < tau; ++n)
    orb.points_full.push_back(standard_map_step(orb.points_full.back(), params));
  orb.points_half.reserve(static_cast<size_t>(tau));
  for (int n = 0; n < tau; ++n) {
    double p_half = orb.points_full[static_cast<size_t>(n) + 1].p_unreduced(params.S);
    double q_half = orb.points_full[static_cast<size_t>(n)].q_unreduced() + 0.5 * p_half;
    orb.points_half.push_back(make_point(q_half, p_half, params.S));
  }
  orb.shift_in = torus_distance(orb.points_full.front(), alpha, params.S);
  orb.shift_out = torus_distance(orb.points_full.back(), beta, params.S);
  return orb;
}

struct OrbitReport {
  std::vector<double> step_residuals;  ///< |x(n+1) - F(x(n))| per step
  double max_residual = 0.0;
  double max_half_inconsistency = 0.0;
  double shift_in = 0.0;
  double shift_out = 0.0;
};

/// Residual statistics: forward-map residuals per step, half-point
/// consistency, and the stored endpoint shift distances.
inline OrbitReport verify_orbit(const ControlOrbit& orbit, const KickedRotorParams& params) {
  OrbitReport rep;
  rep.shift_in = orbit.shift_in;
  rep.shift_out = orbit.shift_out;
  for (int n = 0; n < orbit.tau; ++n) {
    PhasePoint pred = standard_map_step(orbit.at(n), params);
    double dq = pred.q_unreduced() - orbit.at(n + 1).q_unreduced();
    double dp = pred.p_unreduced(params.S) - orbit.at(n + 1).p_unreduced(params.S);
    // windings of pred continue from x(n); compare on the torus to be safe
    dq = reduce_centered(dq, 1.0);
    dp = reduce_centered(dp, params.S);
    double r = std::hypot(dq, dp);
    rep.step_residuals.push_back(r);
    rep.max_residual = std::max(rep.max_residual, r);

    double p_half = orbit.at(n + 1).p_unreduced(params.S);
    double q_half = orbit.at(n).q_unreduced() + 0.5 * p_half;
    double hq = reduce_centered(orbit.at_half(n).q_unreduced() - q_half, 1.0);
    double hp = reduce_centered(orbit.at_half(n).p_unreduced(params.S) - p_half, params.S);
    rep.max_half_inconsistency = std::max(rep.max_half_inconsistency, std::hypot(hq, hp));
  }
  return rep;
}

/// Constraint verification of the control potentials along the orbit.
inline ConstraintReport verify_constraints(const ControlOrbit& orbit, ControlScheme scheme) {
  std::vector<double> qf, qh;
  for (int n = 0; n < orbit.tau; ++n) {
    qf.push_back(orbit.at(n).q_unreduced());
    qh.push_back(orbit.at_half(n).q_unreduced());
  }
  KickedRotorParams params{orbit.K, 2.0};
  return verify_constraints(qf, qh, scheme, params);
}

// ---- JSON orbit files: {K, tau, points_full: [[q,p],...], points_half: [[q,p],...],
//      shift_in, shift_out} with unreduced coordinates.

inline nlohmann::ordered_json orbit_to_json(const ControlOrbit& orbit, double p_period = 2.0) {
  nlohmann::ordered_json j;
  j["K"] = orbit.K;
  j["tau"] = orbit.tau;
  auto pts = nlohmann::ordered_json::array();
  for (const auto& x : orbit.points_full)
    pts.push_back({x.q_unreduced(), x.p_unreduced(p_period)});
  j["points_full"] = pts;
  auto hpts = nlohmann::ordered_json::array();
  for (const auto& x : orbit.points_half)
    hpts.push_back({x.q_unreduced(), x.p_unreduced(p_period)});
  j["points_half"] = hpts;
  j["shift_in"] = orbit.shift_in;
  j["shift_out"] = orbit.shift_out;
  return j;
}

inline ControlOrbit orbit_from_json(const nlohmann::json& j, double p_period = 2.0) {
  ControlOrbit orb;
  try {
    orb.K = j.at("K").get<double>();
    orb.tau = j.at("tau").get<int>();
    for (const auto& pt : j.at("points_full"))
      orb.points_full.push_back(make_point(pt.at(0).get<double>(), pt.at(1).get<double>(), p_period));
    if (j.contains("points_half"))
      for (const auto& pt : j.at("points_half"))
        orb.points_half.push_back(make_point(pt.at(0).get<double>(), pt.at(1).get<double>(), p_period));
    orb.shift_in = j.value("shift_in", 0.0);
    orb.shift_out = j.value("shift_out", 0.0);
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("malformed orbit file: ") + e.what());
  }
  if (orb.points_full.size() != static_cast<size_t>(orb.tau) + 1)
    throw config_error("orbit file: points_full must hold tau+1 points");
  // Derive missing half points from the full-step trajectory.
  if (orb.points_half.empty()) {
    for (int n = 0; n < orb.tau; ++n) {
      double ph = orb.points_full[static_cast<size_t>(n) + 1].p_unreduced(p_period);
      double qh = orb.points_full[static_cast<size_t>(n)].q_unreduced() + 0.5 * ph;
      orb.points_half.push_back(make_point(qh, ph, p_period));
    }
  }
  if (orb.points_half.size() != static_cast<size_t>(orb.tau))
    throw config_error("orbit file: points_half must hold tau points");
  return orb;
}

}  // namespace krc
