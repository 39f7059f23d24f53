#pragma once

#include <cmath>

#include "krc/torus.hpp"

namespace krc {

/// 2x2 tangent-map matrix. Ordering convention: the displacement vector is
/// (dp, dq) with momentum FIRST,
///
///   (dp', dq')^T = M (dp, dq)^T,
///
/// matching the single-step stability matrix of the map. Using the opposite
/// ordering silently breaks the block formulas of the quadratic generating
/// function, so everything in this library sticks to momentum-first.
struct StabilityMatrix {
  double m11 = 1.0, m12 = 0.0;
  double m21 = 0.0, m22 = 1.0;

  double det() const { return m11 * m22 - m12 * m21; }
  double trace() const { return m11 + m22; }

  bool symplectic(double tol = 1e-12) const { return std::abs(det() - 1.0) <= tol; }

  StabilityMatrix operator*(const StabilityMatrix& r) const {
    return {m11 * r.m11 + m12 * r.m21, m11 * r.m12 + m12 * r.m22,
            m21 * r.m11 + m22 * r.m21, m21 * r.m12 + m22 * r.m22};
  }

  /// Apply to a (dp, dq) displacement.
  void apply(double& dp, double& dq) const {
    double np = m11 * dp + m12 * dq;
    double nq = m21 * dp + m22 * dq;
    dp = np;
    dq = nq;
  }

  StabilityMatrix inverse() const {  // valid for det = 1
    return {m22, -m12, -m21, m11};
  }
};

/// Free flight for time t: (dp, dq) -> (dp, dq + t dp).
inline StabilityMatrix flight_matrix(double t) { return {1.0, 0.0, t, 1.0}; }

/// Instantaneous kick with potential curvature V'' = c: dp -> dp - c dq.
inline StabilityMatrix kick_matrix(double c) { return {1.0, -c, 0.0, 1.0}; }

}  // namespace krc
