#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Dense>

#include "krc/torus.hpp"

namespace krc {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

/// Finite Hilbert space on the (q, p) torus of area S with null Bloch
/// phases: N position states q_j = j/N, momentum eigenvalues p_m = S m / N,
/// and 2 pi hbar = S / N.
struct TorusQuantization {
  int N = 0;
  double S = 2.0;

  TorusQuantization() = default;
  TorusQuantization(int n, double s) : N(n), S(s) {
    if (N < 2) throw config_error("Hilbert space dimension N must be >= 2");
    if (S != 1.0 && S != 2.0) throw config_error("torus action S must be 1 or 2");
  }

  double hbar() const { return S / (2.0 * std::numbers::pi * static_cast<double>(N)); }
  double h() const { return S / static_cast<double>(N); }
  double q(int j) const { return static_cast<double>(j) / static_cast<double>(N); }
  /// Branch-centered momentum index in [-N/2, N/2).
  int m_centered(int m) const { return m < (N + 1) / 2 ? m : m - N; }
  /// Momentum value on the branch centered at 0.
  double p_centered(int m) const { return S * static_cast<double>(m_centered(m)) / N; }
};

/// Unitary DFT between position and momentum bases,
///   psi_m = (1/sqrt N) sum_j exp(-2 pi i m j / N) psi_j.
/// The dense matrix doubles as the kernel for dense-operator tests.
struct Fourier {
  Mat F;

  explicit Fourier(const TorusQuantization& tq) {
    const int N = tq.N;
    F.resize(N, N);
    for (int m = 0; m < N; ++m)
      for (int j = 0; j < N; ++j) {
        double ph = -2.0 * std::numbers::pi * static_cast<double>(m) * static_cast<double>(j) /
                    static_cast<double>(N);
        F(m, j) = Complex(std::cos(ph), std::sin(ph));
      }
    F /= std::sqrt(static_cast<double>(N));
  }

  Vec to_momentum(const Vec& psi) const { return F * psi; }
  Vec to_position(const Vec& phi) const { return F.adjoint() * phi; }
};

}  // namespace krc
