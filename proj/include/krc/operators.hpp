#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "krc/gaussian.hpp"
#include "krc/orbit.hpp"
#include "krc/potentials.hpp"
#include "krc/quantization.hpp"
#include "krc/stability.hpp"

namespace krc {

/// Unitary as a chain of diagonal phase factors, each in the position or the
/// momentum basis (momentum factors are DFT-conjugated on application).
/// Exactly unitary by construction; to_dense() materializes the matrix for
/// kernel-equivalence and unitarity tests.
struct UnitaryOperator {
  struct Factor {
    bool in_momentum = false;
    Vec phase;  ///< unit-modulus diagonal
  };
  std::vector<Factor> factors;  ///< applied front to back

  void apply_in_place(const Fourier& fourier, Vec& psi) const {
    for (const auto& f : factors) {
      if (f.in_momentum) {
        Vec phi = fourier.to_momentum(psi);
        phi.array() *= f.phase.array();
        psi = fourier.to_position(phi);
      } else {
        psi.array() *= f.phase.array();
      }
    }
  }

  Vec apply(const Fourier& fourier, const Vec& psi) const {
    Vec out = psi;
    apply_in_place(fourier, out);
    return out;
  }

  Mat to_dense(const Fourier& fourier) const {
    const auto n = fourier.F.rows();
    Mat U = Mat::Identity(n, n);
    for (const auto& f : factors) {
      if (f.in_momentum)
        U = fourier.F.adjoint() * (f.phase.asDiagonal() * (fourier.F * U));
      else
        U = f.phase.asDiagonal() * U;
    }
    return U;
  }

  /// Compose: this after other (i.e. result = this * other).
  UnitaryOperator after(const UnitaryOperator& other) const {
    UnitaryOperator u = other;
    u.factors.insert(u.factors.end(), factors.begin(), factors.end());
    return u;
  }
};

/// max_k |(U^dag U - I) e_k| for a dense matrix.
inline double unitarity_deviation(const Mat& U) {
  Mat D = U.adjoint() * U - Mat::Identity(U.rows(), U.cols());
  return D.colwise().norm().maxCoeff();
}

inline Vec phase_vector(int n, auto&& phase_fn) {
  Vec v(n);
  for (int k = 0; k < n; ++k) {
    double ph = phase_fn(k);
    v(k) = Complex(std::cos(ph), std::sin(ph));
  }
  return v;
}

/// Free-flight factor for time t: exp(-i p^2 t / 2 hbar) with branch-centered
/// momentum. Phase reduces to -pi S t m^2 / N, integer-safe for full and
/// half steps on both torus actions.
inline UnitaryOperator::Factor kinetic_factor(const TorusQuantization& tq, double t) {
  return {true, phase_vector(tq.N, [&](int m) {
            double mc = static_cast<double>(tq.m_centered(m));
            return -std::numbers::pi * tq.S * t * mc * mc / static_cast<double>(tq.N);
          })};
}

/// Kick factor exp(-i V(q_j)/hbar) for an arbitrary potential sampled on the grid.
inline UnitaryOperator::Factor kick_factor(const TorusQuantization& tq, auto&& potential) {
  const double hb = tq.hbar();
  return {false, phase_vector(tq.N, [&](int j) { return -potential(tq.q(j)) / hb; })};
}

/// One-period Floquet operator of the plain kicked rotor: kick, then free
/// flight for one period (two half steps on the doubled torus).
inline UnitaryOperator floquet_uncontrolled(const TorusQuantization& tq,
                                            const KickedRotorParams& params) {
  params.validate();
  if (params.S != tq.S) throw config_error("floquet_uncontrolled: torus action mismatch");
  UnitaryOperator u;
  u.factors.push_back(kick_factor(tq, [&](double q) { return base_kick_potential(q, params.K); }));
  u.factors.push_back(kinetic_factor(tq, 1.0));
  return u;
}

/// Literal dense one-step kernel on the unit torus (S = 1),
///   U_jk = (1/sqrt(iN)) exp[i pi (j-k)^2 / N] exp[(i N K / 2 pi) cos(2 pi k / N)].
inline Mat floquet_unit_torus_dense(const TorusQuantization& tq, const KickedRotorParams& params) {
  if (tq.S != 1.0) throw config_error("floquet_unit_torus_dense requires S = 1");
  const int N = tq.N;
  const Complex pref = 1.0 / std::sqrt(Complex(0.0, static_cast<double>(N)));
  Mat U(N, N);
  for (int j = 0; j < N; ++j)
    for (int k = 0; k < N; ++k) {
      double d = static_cast<double>(j - k);
      double ph = std::numbers::pi * d * d / N +
                  params.K * static_cast<double>(N) / kTwoPi * std::cos(kTwoPi * k / N);
      U(j, k) = pref * Complex(std::cos(ph), std::sin(ph));
    }
  return U;
}

/// The two controlled half-step unitaries for step n: U1 kicks with the
/// full-step potential of the scheme at q_gamma(n) and free-flies half a
/// period; U2 does the same with the half-step potential at q_gamma(n+1/2).
/// Kick phases are exactly -V(q_j)/hbar.
inline std::pair<UnitaryOperator, UnitaryOperator> controlled_half_steps(
    const TorusQuantization& tq, const ControlOrbit& orbit, ControlScheme scheme, int n) {
  if (!has_designed_potential(scheme))
    throw config_error("controlled_half_steps: scheme has no designed potential");
  if (tq.S != 2.0) throw config_error("controlled dynamics lives on the doubled torus (S = 2)");
  KickedRotorParams params{orbit.K, 2.0};
  KickPotential vf{scheme, KickTiming::Full, orbit.at(n).q_unreduced(), params};
  KickPotential vh{scheme, KickTiming::Half, orbit.at_half(n).q_unreduced(), params};
  UnitaryOperator u1, u2;
  u1.factors.push_back(kick_factor(tq, [&](double q) { return potential_value(vf, q); }));
  u1.factors.push_back(kinetic_factor(tq, 0.5));
  u2.factors.push_back(kick_factor(tq, [&](double q) { return potential_value(vh, q); }));
  u2.factors.push_back(kinetic_factor(tq, 0.5));
  return {u1, u2};
}

/// Dense version of the half-step kernels, kinetic Gauss-sum prefactor times
/// the kick phase on the input index.
inline std::pair<Mat, Mat> controlled_half_steps_dense(const TorusQuantization& tq,
                                                       const ControlOrbit& orbit,
                                                       ControlScheme scheme, int n) {
  if (!has_designed_potential(scheme))
    throw config_error("controlled_half_steps_dense: scheme has no designed potential");
  const int N = tq.N;
  const double hb = tq.hbar();
  KickedRotorParams params{orbit.K, 2.0};
  KickPotential vf{scheme, KickTiming::Full, orbit.at(n).q_unreduced(), params};
  KickPotential vh{scheme, KickTiming::Half, orbit.at_half(n).q_unreduced(), params};
  const Complex pref = 1.0 / std::sqrt(Complex(0.0, static_cast<double>(N)));
  Mat U1(N, N), U2(N, N);
  for (int j = 0; j < N; ++j)
    for (int k = 0; k < N; ++k) {
      double d = static_cast<double>(j - k);
      double kin = std::numbers::pi * d * d / N;
      double ph1 = kin - potential_value(vf, tq.q(k)) / hb;
      double ph2 = kin - potential_value(vh, tq.q(k)) / hb;
      U1(j, k) = pref * Complex(std::cos(ph1), std::sin(ph1));
      U2(j, k) = pref * Complex(std::cos(ph2), std::sin(ph2));
    }
  return {U1, U2};
}

/// Phase-space displacement exp[i (dp qhat - phat dq)/hbar], built with the
/// exact symmetric splitting: position phase, momentum translation, position
/// phase. Branch cuts sit opposite (center_q, center_p), which is where the
/// displaced packet must live; a fixed global cut would drag a phase seam
/// through packets near the origin.
inline UnitaryOperator shift_operator(const TorusQuantization& tq, double dq, double dp,
                                      double center_q = 0.5, double center_p = 0.0) {
  const double hb = tq.hbar();
  UnitaryOperator u;
  auto pos = phase_vector(tq.N, [&](int j) {
    return dp * reduce_centered(tq.q(j) - center_q, 1.0) / (2.0 * hb);
  });
  u.factors.push_back({false, pos});
  u.factors.push_back({true, phase_vector(tq.N, [&](int m) {
                         double p = tq.S * static_cast<double>(m) / tq.N;
                         double pb = center_p + reduce_centered(p - center_p, tq.S);
                         return -dq * pb / hb;
                       })});
  u.factors.push_back({false, pos});
  return u;
}

/// Unwinding operator U_{M^-1} for a symplectic M with m21 != 0, centered on
/// the orbit point (center_q, center_p). Uses the exact shear factorization
///   M = M_K(c2) M_f(m21) M_K(c1),  c1 = (1 - m22)/m21, c2 = (1 - m11)/m21,
/// so U_{M^-1} is a position chirp, an inverse free flight (momentum chirp),
/// and another position chirp, all branch-reduced about the center. Each
/// factor is a unit-modulus diagonal, hence the result is exactly unitary.
inline UnitaryOperator unwind_operator(const TorusQuantization& tq, const StabilityMatrix& m,
                                       double center_q, double center_p) {
  if (!m.symplectic(1e-9))
    throw config_error("unwind_operator: matrix is not symplectic (det != 1)");
  if (std::abs(m.m21) < 1e-8)
    throw config_error("unwind_operator: |m21| < 1e-8, kernel form invalid; "
                       "compose with a free half-step to regularize");
  const double hb = tq.hbar();
  const double c1 = (1.0 - m.m22) / m.m21;
  const double c2 = (1.0 - m.m11) / m.m21;
  auto pos_chirp = [&](double c) {
    return UnitaryOperator::Factor{false, phase_vector(tq.N, [&](int j) {
                                     double x = reduce_centered(tq.q(j) - center_q, 1.0);
                                     return c * x * x / (2.0 * hb);
                                   })};
  };
  UnitaryOperator u;
  u.factors.push_back(pos_chirp(c2));  // undo M_K(c2) first
  u.factors.push_back({true, phase_vector(tq.N, [&](int mm) {
                         double p = tq.S * static_cast<double>(mm) / tq.N;
                         double pr = reduce_centered(p - center_p, tq.S);
                         return m.m21 * pr * pr / (2.0 * hb);
                       })});
  u.factors.push_back(pos_chirp(c1));
  return u;
}

/// Literal sampled kernel of the inverse linear canonical transformation
/// (quadratic generating function, corrective momentum-centering phase),
/// kept as a diagnostic: its deviation from unitarity is structural, O(1) at
/// every N, and the closest-unitary (polar) correction still mishandles
/// packets once the dynamics stretches them across the branch window. The
/// factored unwind_operator above is what propagation uses.
struct SampledUnwindKernel {
  Mat raw;       ///< sampled kernel, physical normalization
  Mat unitary;   ///< polar factor (closest unitary)
  double pre_polar_deviation = 0.0;
};

inline SampledUnwindKernel unwind_kernel_sampled(const TorusQuantization& tq,
                                                 const StabilityMatrix& m, double center_q,
                                                 double center_p) {
  if (!m.symplectic(1e-9)) throw config_error("unwind_kernel_sampled: det != 1");
  if (std::abs(m.m21) < 1e-8) throw config_error("unwind_kernel_sampled: |m21| too small");
  const int N = tq.N;
  const double hb = tq.hbar();
  // generating function of M^-1: S(x, y) = [m22 x^2 - 2 x y + m11 y^2] / (-2 m21)
  const double a = -m.m22 / m.m21;
  const double b = 1.0 / m.m21;
  const double c = -m.m11 / m.m21;
  Mat W(N, N);
  const double scale = 1.0 / std::sqrt(2.0 * N * std::abs(m.m21));
  for (int j = 0; j < N; ++j) {
    double x = reduce_centered(tq.q(j) - center_q, 1.0);
    for (int k = 0; k < N; ++k) {
      double y = reduce_centered(tq.q(k) - center_q, 1.0);
      double ph = (0.5 * a * x * x + b * x * y + 0.5 * c * y * y + center_p * (x - y)) / hb;
      W(j, k) = scale * Complex(std::cos(ph), std::sin(ph));
    }
  }
  SampledUnwindKernel out;
  out.raw = W;
  out.pre_polar_deviation = unitarity_deviation(W);
  Eigen::SelfAdjointEigenSolver<Mat> es(W.adjoint() * W);
  Vec inv_sqrt(N);
  for (int i = 0; i < N; ++i) inv_sqrt(i) = 1.0 / std::sqrt(std::max(es.eigenvalues()(i), 1e-300));
  out.unitary = W * (es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().adjoint());
  return out;
}

}  // namespace krc
