#pragma once

#include <cmath>
#include <stdexcept>

namespace krc {

/// Configuration error: bad parameters, malformed input, scheme misuse.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure: non-convergence, unitarity loss, precondition on data.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Point on the (q, p) torus, q in [0,1), p in [0,S), with winding counters
/// so the unreduced trajectory is recoverable exactly.
struct PhasePoint {
  double q = 0.0;
  double p = 0.0;
  long wind_q = 0;
  long wind_p = 0;

  double q_unreduced() const { return q + static_cast<double>(wind_q); }
  /// Momentum period is the torus action S (2 for the doubled torus).
  double p_unreduced(double period = 2.0) const {
    return p + period * static_cast<double>(wind_p);
  }
};

struct KickedRotorParams {
  double K = 8.0;
  /// Torus action S (phase-space area): 2 for the controlled system, 1 for
  /// the plain unit-torus rotor.
  double S = 2.0;

  void validate() const {
    if (!(K > 0.0)) throw config_error("kick strength K must be positive");
    if (S != 1.0 && S != 2.0) throw config_error("torus action S must be 1 or 2");
  }
};

/// Reduce x into [0, period); returns the integer winding removed.
inline long reduce_wind(double& x, double period) {
  double w = std::floor(x / period);
  x -= w * period;
  if (x >= period) {  // guard against floor rounding at the boundary
    x -= period;
    w += 1.0;
  }
  return static_cast<long>(w);
}

/// Reduce a displacement to the symmetric window [-period/2, period/2).
inline double reduce_centered(double x, double period = 1.0) {
  return x - period * std::round(x / period);
}

inline PhasePoint make_point(double q, double p, double p_period = 2.0) {
  PhasePoint x;
  x.q = q;
  x.p = p;
  x.wind_q = reduce_wind(x.q, 1.0);
  x.wind_p = reduce_wind(x.p, p_period);
  return x;
}

/// Euclidean distance between nearest torus images, q and p weighted equally.
inline double torus_distance(const PhasePoint& a, const PhasePoint& b,
                             double p_period = 2.0) {
  double dq = reduce_centered(a.q - b.q, 1.0);
  double dp = reduce_centered(a.p - b.p, p_period);
  return std::hypot(dq, dp);
}

}  // namespace krc
