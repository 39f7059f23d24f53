#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "krc/stability.hpp"
#include "krc/torus.hpp"

namespace krc {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// One step of the standard map,
///   p' = p - (K/2pi) sin(2pi q)   (mod S)
///   q' = q + p'                   (mod 1)
/// with winding counters updated so the unreduced trajectory is exact.
inline PhasePoint standard_map_step(const PhasePoint& x, const KickedRotorParams& params) {
  PhasePoint y = x;
  y.p = x.p - params.K / kTwoPi * std::sin(kTwoPi * x.q);
  y.wind_p += reduce_wind(y.p, params.S);
  y.q = x.q + y.p;
  y.wind_q += reduce_wind(y.q, 1.0);
  return y;
}

/// Inverse step: q = q' - p' (mod 1), p = p' + (K/2pi) sin(2pi q) (mod S).
inline PhasePoint inverse_standard_map_step(const PhasePoint& x, const KickedRotorParams& params) {
  PhasePoint y = x;
  y.q = x.q - x.p;
  y.wind_q += reduce_wind(y.q, 1.0);
  y.p = x.p + params.K / kTwoPi * std::sin(kTwoPi * y.q);
  y.wind_p += reduce_wind(y.p, params.S);
  return y;
}

/// Single-step stability matrix of the uncontrolled map at position q:
///   M = M_f M_K = [[1, -K cos 2pi q], [1, 1 - K cos 2pi q]].
inline StabilityMatrix stability_step_uncontrolled(double q, const KickedRotorParams& params) {
  double c = params.K * std::cos(kTwoPi * q);
  return {1.0, -c, 1.0, 1.0 - c};
}

/// Deterministic 64-bit generator (splitmix64) so results do not depend on
/// the standard library's distribution implementations.
struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

/// Largest Lyapunov exponent of the standard map, estimated as the mean log
/// growth rate of QR-renormalized tangent vectors over random initial
/// conditions. For large K this approaches ln(K/2).
inline double lyapunov_estimate(const KickedRotorParams& params, int n_steps, int n_samples,
                                std::uint64_t seed) {
  params.validate();
  if (n_steps < 1000) throw config_error("lyapunov_estimate: n_steps must be >= 1000");
  if (n_samples < 10) throw config_error("lyapunov_estimate: n_samples must be >= 10");
  SplitMix64 rng(seed);
  double total = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    PhasePoint x = make_point(rng.uniform01(), params.S * rng.uniform01(), params.S);
    // tangent frame columns (dp, dq)
    double v1p = 1.0, v1q = 0.0, v2p = 0.0, v2q = 1.0;
    double sum_log = 0.0;
    for (int n = 0; n < n_steps; ++n) {
      StabilityMatrix m = stability_step_uncontrolled(x.q, params);
      m.apply(v1p, v1q);
      m.apply(v2p, v2q);
      // Gram-Schmidt renormalization
      double r11 = std::hypot(v1p, v1q);
      v1p /= r11;
      v1q /= r11;
      double r12 = v1p * v2p + v1q * v2q;
      v2p -= r12 * v1p;
      v2q -= r12 * v1q;
      double r22 = std::hypot(v2p, v2q);
      v2p /= r22;
      v2q /= r22;
      sum_log += std::log(r11);
      x = standard_map_step(x, params);
    }
    total += sum_log / static_cast<double>(n_steps);
  }
  return total / static_cast<double>(n_samples);
}

}  // namespace krc
