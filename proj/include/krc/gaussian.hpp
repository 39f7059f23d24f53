#pragma once

#include <cmath>

#include "krc/quantization.hpp"
#include "krc/torus.hpp"

namespace krc {

/// Minimum-uncertainty packet centroids. The normalization is fixed by the
/// state itself, not a free parameter.
struct WavePacketSpec {
  double q_c = 0.5;
  double p_c = 0.0;
};

/// Gaussian wave packet on the position grid,
///   psi_j = A exp[-(q_j - q_c)^2 / 2 hbar + (i/hbar) p_c (q_j - q_c)],
/// with each q_j taken on the branch |q_j - q_c| <= 1/2. Valid only while
/// the wrapped tails are negligible: exp(-1/(8 hbar)) < 1e-6.
inline Vec build_gaussian(const WavePacketSpec& spec, const TorusQuantization& tq) {
  const double hb = tq.hbar();
  if (std::exp(-1.0 / (8.0 * hb)) >= 1e-6)
    throw config_error("build_gaussian: torus too coarse, packet tails touch (need exp(-1/8 hbar) < 1e-6)");
  Vec psi(tq.N);
  for (int j = 0; j < tq.N; ++j) {
    double x = reduce_centered(tq.q(j) - spec.q_c, 1.0);
    double amp = std::exp(-x * x / (2.0 * hb));
    double ph = spec.p_c * x / hb;
    psi(j) = amp * Complex(std::cos(ph), std::sin(ph));
  }
  psi.normalize();
  return psi;
}

/// Packet centroid (q, p) measured with circular means (branch-safe), then
/// refined by the exact linear mean on the located branch.
inline WavePacketSpec measure_centroid(const Vec& psi, const TorusQuantization& tq,
                                       const Fourier& fourier) {
  const int N = tq.N;
  Complex zq = 0.0;
  for (int j = 0; j < N; ++j) {
    double w = std::norm(psi(j));
    double ph = kTwoPi * tq.q(j);
    zq += w * Complex(std::cos(ph), std::sin(ph));
  }
  double qc = std::arg(zq) / kTwoPi;
  double mq = 0.0;
  for (int j = 0; j < N; ++j) mq += std::norm(psi(j)) * reduce_centered(tq.q(j) - qc, 1.0);
  qc += mq;
  qc -= std::floor(qc);

  Vec phi = fourier.to_momentum(psi);
  Complex zp = 0.0;
  for (int m = 0; m < N; ++m) {
    double w = std::norm(phi(m));
    double ph = kTwoPi * (tq.S * static_cast<double>(m) / N) / tq.S;
    zp += w * Complex(std::cos(ph), std::sin(ph));
  }
  double pc = tq.S * std::arg(zp) / kTwoPi;
  double mp = 0.0;
  for (int m = 0; m < N; ++m)
    mp += std::norm(phi(m)) * reduce_centered(tq.S * static_cast<double>(m) / N - pc, tq.S);
  pc += mp;
  pc -= tq.S * std::floor(pc / tq.S);
  return {qc, pc};
}

/// Second moments about the centroid: Var q, Var p, and the symmetrized
/// cross term Re<(q - qc)(p - pc)>. For a minimum-uncertainty Gaussian the
/// covariance determinant is hbar^2/4.
struct PacketCovariance {
  double var_q = 0.0, var_p = 0.0, cov_qp = 0.0;
  double det() const { return var_q * var_p - cov_qp * cov_qp; }
};

inline PacketCovariance measure_covariance(const Vec& psi, const TorusQuantization& tq,
                                           const Fourier& fourier) {
  auto c = measure_centroid(psi, tq, fourier);
  const int N = tq.N;
  PacketCovariance cov;
  Vec xpsi(N);
  for (int j = 0; j < N; ++j) {
    double x = reduce_centered(tq.q(j) - c.q_c, 1.0);
    cov.var_q += std::norm(psi(j)) * x * x;
    xpsi(j) = x * psi(j);
  }
  Vec phi = fourier.to_momentum(psi);
  Vec ppsi_m(N);
  for (int m = 0; m < N; ++m) {
    double pr = reduce_centered(tq.S * static_cast<double>(m) / N - c.p_c, tq.S);
    cov.var_p += std::norm(phi(m)) * pr * pr;
    ppsi_m(m) = pr * phi(m);
  }
  Vec ppsi = fourier.to_position(ppsi_m);
  cov.cov_qp = std::real(xpsi.dot(ppsi));  // Eigen dot conjugates the left argument
  return cov;
}

/// |<a|b>|^2, the phase-insensitive overlap.
inline double fidelity(const Vec& a, const Vec& b) { return std::norm(a.dot(b)); }

/// Distance between states modulo one global phase.
inline double distance_up_to_phase(const Vec& a, const Vec& b) {
  Complex ov = a.dot(b);
  double m = std::abs(ov);
  Complex phase = m > 0.0 ? ov / m : Complex(1.0, 0.0);
  return (b - phase * a).norm();
}

}  // namespace krc
