#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "krc/orbit.hpp"
#include "krc/standard_map.hpp"
#include "krc/torus.hpp"

namespace krc {

struct SearchConfig {
  int tau = 6;
  PhasePoint alpha{0.5, 0.0};  ///< entry fixed point
  PhasePoint beta{0.0, 0.0};   ///< exit fixed point
  double newton_tol = 1e-12;
  int max_iter = 50;
  double capture_radius = 0.05;
  /// Accepted total q-windings of candidates; empty accepts all.
  std::vector<long> candidate_windings;

  void validate() const {
    if (newton_tol <= 0.0) throw config_error("newton_tol must be positive");
    if (capture_radius <= 0.0 || capture_radius > 0.25)
      throw config_error("capture_radius must lie in (0, 0.25]");
    if (max_iter < 1) throw config_error("max_iter must be >= 1");
  }
};

namespace detail {

/// Unstable eigendirection (dq, dp), unit length, positive dq, at a fixed
/// point with p = 0. The linearization in (dq, dp) ordering is
/// [[1-c, 1], [-c, 1]]^T ... i.e. dq' = (1-c) dq + dp is wrong way round;
/// with c = K cos(2pi q*) the map gives dp' = dp - c dq, dq' = dq + dp', so
/// the (dq, dp) matrix is [[1-c, 1], [-c, 1]].
struct FixedPointFrame {
  double lambda_u = 0.0;
  double vq = 1.0, vp = 0.0;  // unstable direction
};

inline FixedPointFrame unstable_frame(const PhasePoint& fp, const KickedRotorParams& params) {
  double c = params.K * std::cos(kTwoPi * fp.q);
  double tr = 2.0 - c;
  double disc = tr * tr - 4.0;
  if (disc <= 0.0) throw config_error("endpoint is not a hyperbolic fixed point");
  double lam = 0.5 * (tr + std::copysign(std::sqrt(disc), tr));
  FixedPointFrame f;
  f.lambda_u = lam;
  // eigenvector of [[1-c, 1], [-c, 1]]: (1-c-lam) dq + dp = 0
  double vq = 1.0, vp = lam - (1.0 - c);
  double n = std::hypot(vq, vp);
  f.vq = vq / n;
  f.vp = vp / n;
  return f;
}

/// Exit distance (squared) and its s-derivative for x0 = alpha + s v.
struct ExitEval {
  double dist2 = 0.0;
  double ddist2 = 0.0;
  PhasePoint exit;
};

inline ExitEval exit_eval(double s, const PhasePoint& alpha, const FixedPointFrame& fr,
                          const PhasePoint& beta, int tau, const KickedRotorParams& params) {
  PhasePoint x = make_point(alpha.q + s * fr.vq, alpha.p + s * fr.vp, params.S);
  double tp = fr.vp, tq = fr.vq;  // tangent, (dp, dq) applied below
  for (int n = 0; n < tau; ++n) {
    StabilityMatrix m = stability_step_uncontrolled(x.q, params);
    m.apply(tp, tq);
    x = standard_map_step(x, params);
  }
  double dq = reduce_centered(x.q - beta.q, 1.0);
  double dp = reduce_centered(x.p - beta.p, params.S);
  return {dq * dq + dp * dp, 2.0 * (dq * tq + dp * tp), x};
}

inline double exit_dist(double s, const PhasePoint& alpha, const FixedPointFrame& fr,
                        const PhasePoint& beta, int tau, const KickedRotorParams& params) {
  PhasePoint x = make_point(alpha.q + s * fr.vq, alpha.p + s * fr.vp, params.S);
  for (int n = 0; n < tau; ++n) x = standard_map_step(x, params);
  double dq = reduce_centered(x.q - beta.q, 1.0);
  double dp = reduce_centered(x.p - beta.p, params.S);
  return std::hypot(dq, dp);
}

}  // namespace detail

/// All connecting orbits of length tau found by scanning the unstable
/// eigenline of alpha (both branches) and, at each local minimum of the exit
/// distance, polishing the entry parameter with Newton on the squared exit
/// distance through exact tangent maps. Orbits are accepted when both
/// endpoint distances fall inside the capture radius. The result is sorted
/// by shift_in + shift_out, then shift_in, then entry position.
inline std::vector<ControlOrbit> find_orbits(const SearchConfig& config,
                                             const KickedRotorParams& params) {
  params.validate();
  config.validate();
  if (config.tau < 1) return {};
  if (torus_distance(standard_map_step(config.alpha, params), config.alpha, params.S) > 1e-12)
    throw config_error("alpha is not a fixed point of the map");
  if (torus_distance(standard_map_step(config.beta, params), config.beta, params.S) > 1e-12)
    throw config_error("beta is not a fixed point of the map");

  auto fr = detail::unstable_frame(config.alpha, params);

  // The exit distance is Lipschitz with constant ~ (K+2)^tau near its dips;
  // scale the scan density so no dip narrower than the capture bowl is missed.
  double lipschitz = std::pow(params.K + 2.0, config.tau);
  long n0 = static_cast<long>(std::ceil(config.capture_radius * lipschitz / 0.3));
  n0 = std::clamp<long>(n0, 100000, 50000000);
  const double h0 = config.capture_radius / static_cast<double>(n0);

  std::vector<double> roots;
  for (double sign : {1.0, -1.0}) {
    // level-0 uniform scan
    std::vector<double> g(static_cast<size_t>(n0) + 1);
    for (long i = 0; i <= n0; ++i)
      g[static_cast<size_t>(i)] = detail::exit_dist(sign * h0 * static_cast<double>(i),
                                                    config.alpha, fr, config.beta, config.tau,
                                                    params);
    for (long i = 1; i < n0; ++i) {
      if (!(g[static_cast<size_t>(i)] <= g[static_cast<size_t>(i) - 1] &&
            g[static_cast<size_t>(i)] <= g[static_cast<size_t>(i) + 1]))
        continue;
      // zoom refinement around the coarse minimum
      double lo = sign * h0 * static_cast<double>(i - 1);
      double hi = sign * h0 * static_cast<double>(i + 1);
      for (int level = 0; level < 12 && std::abs(hi - lo) > 1e-16; ++level) {
        const int pts = 64;
        double best = lo, bestv = HUGE_VAL;
        for (int k = 0; k <= pts; ++k) {
          double s = lo + (hi - lo) * static_cast<double>(k) / pts;
          double v = detail::exit_dist(s, config.alpha, fr, config.beta, config.tau, params);
          if (v < bestv) {
            bestv = v;
            best = s;
          }
        }
        double w = (hi - lo) / pts;
        lo = best - 2.0 * w;
        hi = best + 2.0 * w;
      }
      double s = 0.5 * (lo + hi);
      // Newton polish on the squared exit distance
      for (int it = 0; it < config.max_iter; ++it) {
        auto e = detail::exit_eval(s, config.alpha, fr, config.beta, config.tau, params);
        double fd_step = std::max(std::abs(s) * 1e-9, 1e-15);
        auto ep = detail::exit_eval(s + fd_step, config.alpha, fr, config.beta, config.tau, params);
        double curv = (ep.ddist2 - e.ddist2) / fd_step;
        if (!(curv > 0.0)) break;
        double step = -e.ddist2 / curv;
        s += step;
        if (std::abs(step) < std::abs(s) * 1e-15 + 1e-18) break;
      }
      if (std::abs(s) > config.capture_radius) continue;
      if (detail::exit_dist(s, config.alpha, fr, config.beta, config.tau, params) >
          config.capture_radius)
        continue;
      roots.push_back(s);
    }
  }

  std::sort(roots.begin(), roots.end());
  std::vector<ControlOrbit> orbits;
  double last = HUGE_VAL;
  for (double s : roots) {
    if (std::abs(s - last) < 1e-11) continue;  // duplicate valley
    last = s;
    PhasePoint x0 = make_point(config.alpha.q + s * fr.vq, config.alpha.p + s * fr.vp, params.S);
    ControlOrbit orb = build_orbit(x0, config.tau, params, config.alpha, config.beta);
    if (verify_orbit(orb, params).max_residual > config.newton_tol) continue;
    if (!config.candidate_windings.empty()) {
      long w = orb.points_full.back().wind_q;
      if (std::find(config.candidate_windings.begin(), config.candidate_windings.end(), w) ==
          config.candidate_windings.end())
        continue;
    }
    orbits.push_back(std::move(orb));
  }

  std::sort(orbits.begin(), orbits.end(), [](const ControlOrbit& a, const ControlOrbit& b) {
    double sa = a.shift_in + a.shift_out, sb = b.shift_in + b.shift_out;
    if (sa != sb) return sa < sb;
    if (a.shift_in != b.shift_in) return a.shift_in < b.shift_in;
    return a.points_full.front().q < b.points_full.front().q;
  });
  return orbits;
}

/// The orbit minimizing shift_in + shift_out; ties broken by smaller
/// shift_in, then lexicographically on the entry coordinates. Deterministic
/// and permutation-invariant.
inline ControlOrbit select_optimal(const std::vector<ControlOrbit>& orbits) {
  if (orbits.empty()) throw config_error("select_optimal: empty orbit list");
  const ControlOrbit* best = &orbits.front();
  for (const auto& o : orbits) {
    double so = o.shift_in + o.shift_out, sb = best->shift_in + best->shift_out;
    if (so < sb) {
      best = &o;
    } else if (so == sb) {
      if (o.shift_in < best->shift_in) {
        best = &o;
      } else if (o.shift_in == best->shift_in) {
        const auto& a = o.points_full.front();
        const auto& b = best->points_full.front();
        if (a.q < b.q || (a.q == b.q && a.p < b.p)) best = &o;
      }
    }
  }
  return *best;
}

}  // namespace krc
