#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "krc/gaussian.hpp"
#include "krc/quantization.hpp"

namespace krc {

/// Discrete Wigner-type density on the doubled grid: n_q = 2N positions per
/// q-period, n_p = 2N momenta per p-period. w(a, m) is the signed probability
/// mass per cell and sums to 1; marginals over cells reproduce |psi|^2 in
/// position and momentum exactly on the even sub-grids. Like every doubled
/// grid construction it carries antipodal ghost images (sign-alternating in
/// the momentum index), so peak and contour queries work in a window around
/// the packet centroid.
struct PhaseSpaceDensity {
  int N = 0;
  double S = 2.0;
  int n_q = 0, n_p = 0;
  Eigen::MatrixXd w;  ///< n_q x n_p cell masses

  double dq() const { return 1.0 / n_q; }
  double dp() const { return S / n_p; }
  double cell_area() const { return dq() * dp(); }
  double q_of(int a) const { return static_cast<double>(a) * dq(); }
  double p_of(int m) const { return static_cast<double>(m) * dp(); }
  /// Density per unit phase-space area.
  double density(int a, int m) const { return w(a, m) / cell_area(); }

  std::vector<double> marginal_q() const {  // per position cell j (N cells)
    std::vector<double> out(static_cast<size_t>(N), 0.0);
    for (int j = 0; j < N; ++j)
      for (int m = 0; m < n_p; ++m) out[static_cast<size_t>(j)] += w(2 * j, m);
    return out;
  }
  std::vector<double> marginal_p() const {  // per momentum cell m (N cells)
    std::vector<double> out(static_cast<size_t>(N), 0.0);
    for (int m = 0; m < N; ++m)
      for (int a = 0; a < n_q; ++a) out[static_cast<size_t>(m)] += w(a, 2 * m);
    return out;
  }
};

/// Symmetrized autocorrelation transform of the periodized wavefunction,
///   w(a, m) = (1/2N) Re sum_t psi*(x - y_t) psi(x + y_t) exp(-2 i p_m y_t / hbar),
/// evaluated on the native doubled grid. `resolution` is validated against
/// the native (2N, 2N); coarser is an error, finer is not supported (the
/// transform's exactness properties only hold on the native grid).
inline PhaseSpaceDensity wigner_transform(const Vec& psi, const TorusQuantization& tq,
                                          std::pair<int, int> resolution = {0, 0}) {
  const int N = tq.N;
  if (resolution.first == 0) resolution = {2 * N, 2 * N};
  if (resolution.first < 2 * N || resolution.second < 2 * N)
    throw config_error("wigner_transform: resolution too coarse (need >= (2N, 2N))");
  if (resolution.first != 2 * N || resolution.second != 2 * N)
    throw config_error("wigner_transform: only the native (2N, 2N) grid is supported");

  PhaseSpaceDensity d;
  d.N = N;
  d.S = tq.S;
  d.n_q = 2 * N;
  d.n_p = 2 * N;
  d.w.resize(d.n_q, d.n_p);

  // For x = a/(2N), the points x +- y land on the grid for y_t = (a - 2t)/(2N):
  // x - y = t/N and x + y = (a - t)/N. The m-sum is then a DFT over t with an
  // extra half-cell phase exp(-i pi m a / N), computed via B_r below.
  std::vector<Complex> A(static_cast<size_t>(N)), B(static_cast<size_t>(N));
  for (int a = 0; a < 2 * N; ++a) {
    for (int t = 0; t < N; ++t) {
      int jp = ((a - t) % N + N) % N;
      A[static_cast<size_t>(t)] = std::conj(psi(t)) * psi(jp);
    }
    for (int r = 0; r < N; ++r) {
      Complex s = 0.0;
      for (int t = 0; t < N; ++t) {
        double ph = kTwoPi * static_cast<double>(r) * static_cast<double>(t) / N;
        s += A[static_cast<size_t>(t)] * Complex(std::cos(ph), std::sin(ph));
      }
      B[static_cast<size_t>(r)] = s;
    }
    for (int m = 0; m < 2 * N; ++m) {
      double ph = -std::numbers::pi * static_cast<double>(m) * static_cast<double>(a) / N;
      d.w(a, m) = std::real(Complex(std::cos(ph), std::sin(ph)) * B[static_cast<size_t>(m % N)]) /
                  (2.0 * N);
    }
  }
  return d;
}

/// Contour levels relative to the blob peak: the two-standard-deviation
/// contour of a Gaussian sits at exp(-2) of the peak (enclosing area h), the
/// sigma/2 contour at exp(-1/8).
enum class ContourLevel { TwoSigma, HalfSigma };

inline double contour_fraction(ContourLevel lv) {
  return lv == ContourLevel::TwoSigma ? std::exp(-2.0) : std::exp(-0.125);
}

struct Contour {
  std::vector<std::array<double, 2>> points;  ///< (q, p) vertices
  bool closed = false;

  double area() const {  // shoelace
    if (points.size() < 3) return 0.0;
    double s = 0.0;
    for (size_t i = 0; i < points.size(); ++i) {
      const auto& u = points[i];
      const auto& v = points[(i + 1) % points.size()];
      s += u[0] * v[1] - v[0] * u[1];
    }
    return std::abs(s) / 2.0;
  }

  /// Max/min vertex radius about the vertex centroid; 1 for a circle.
  double circularity() const {
    if (points.size() < 3) return HUGE_VAL;
    double cx = 0.0, cy = 0.0;
    for (const auto& p : points) {
      cx += p[0];
      cy += p[1];
    }
    cx /= static_cast<double>(points.size());
    cy /= static_cast<double>(points.size());
    double rmin = HUGE_VAL, rmax = 0.0;
    for (const auto& p : points) {
      double r = std::hypot(p[0] - cx, p[1] - cy);
      rmin = std::min(rmin, r);
      rmax = std::max(rmax, r);
    }
    return rmin > 0.0 ? rmax / rmin : HUGE_VAL;
  }
};

struct ContourSet {
  ContourLevel level = ContourLevel::TwoSigma;
  double threshold = 0.0;          ///< absolute cell-mass threshold used
  std::vector<Contour> contours;   ///< closed ones first, largest area first
  bool fragmented = false;         ///< some contour left the window or split

  const Contour* largest_closed() const {
    for (const auto& c : contours)
      if (c.closed) return &c;
    return nullptr;
  }
};

namespace detail {

/// Peak cell mass in the half-period window around a center.
inline std::pair<double, std::pair<int, int>> window_peak(const PhaseSpaceDensity& d, double qc,
                                                          double pc) {
  int ha = d.n_q / 4, hm = d.n_p / 4;
  int a0 = static_cast<int>(std::lround(qc / d.dq()));
  int m0 = static_cast<int>(std::lround(pc / d.dp()));
  double best = -HUGE_VAL;
  std::pair<int, int> arg{0, 0};
  for (int da = -ha; da < ha; ++da)
    for (int dm = -hm; dm < hm; ++dm) {
      int a = ((a0 + da) % d.n_q + d.n_q) % d.n_q;
      int m = ((m0 + dm) % d.n_p + d.n_p) % d.n_p;
      if (d.w(a, m) > best) {
        best = d.w(a, m);
        arg = {a, m};
      }
    }
  return {best, arg};
}

}  // namespace detail

/// Marching-squares contours at the requested Gaussian levels, extracted in
/// the unwrapped half-period window around (center_q, center_p) — the
/// centroid shift that keeps seam-crossing blobs in one piece and excludes
/// the doubled-grid ghosts. Open or split contours are flagged, not errors.
inline ContourSet extract_contours(const PhaseSpaceDensity& d, ContourLevel level,
                                   double center_q, double center_p) {
  auto [peak, peak_cell] = detail::window_peak(d, center_q, center_p);
  if (!(peak > 0.0)) throw numerical_error("extract_contours: no positive peak in window");
  ContourSet set;
  set.level = level;
  set.threshold = peak * contour_fraction(level);

  // unwrapped window around the peak cell
  const int ha = d.n_q / 4, hm = d.n_p / 4;
  const int a0 = peak_cell.first, m0 = peak_cell.second;
  const int nq = 2 * ha, np = 2 * hm;
  Eigen::MatrixXd win(nq, np);
  for (int i = 0; i < nq; ++i)
    for (int k = 0; k < np; ++k) {
      int a = ((a0 - ha + i) % d.n_q + d.n_q) % d.n_q;
      int m = ((m0 - hm + k) % d.n_p + d.n_p) % d.n_p;
      win(i, k) = d.w(a, m);
    }
  auto qcoord = [&](double i) { return (static_cast<double>(a0 - ha) + i) * d.dq(); };
  auto pcoord = [&](double k) { return (static_cast<double>(m0 - hm) + k) * d.dp(); };

  // marching squares: collect segments per cell, then chain them
  struct Seg {
    std::array<double, 2> a, b;
  };
  std::vector<Seg> segs;
  const double th = set.threshold;
  auto interp = [&](double v0, double v1) { return (th - v0) / (v1 - v0); };
  for (int i = 0; i + 1 < nq; ++i)
    for (int k = 0; k + 1 < np; ++k) {
      double v00 = win(i, k), v10 = win(i + 1, k), v01 = win(i, k + 1), v11 = win(i + 1, k + 1);
      int code = (v00 > th ? 1 : 0) | (v10 > th ? 2 : 0) | (v11 > th ? 4 : 0) | (v01 > th ? 8 : 0);
      if (code == 0 || code == 15) continue;
      // edge midpoints with linear interpolation
      auto bottom = [&] { return std::array<double, 2>{qcoord(i + interp(v00, v10)), pcoord(k)}; };
      auto top = [&] { return std::array<double, 2>{qcoord(i + interp(v01, v11)), pcoord(k + 1)}; };
      auto left = [&] { return std::array<double, 2>{qcoord(i), pcoord(k + interp(v00, v01))}; };
      auto right = [&] {
        return std::array<double, 2>{qcoord(i + 1), pcoord(k + interp(v10, v11))};
      };
      switch (code) {
        case 1: case 14: segs.push_back({bottom(), left()}); break;
        case 2: case 13: segs.push_back({bottom(), right()}); break;
        case 3: case 12: segs.push_back({left(), right()}); break;
        case 4: case 11: segs.push_back({top(), right()}); break;
        case 6: case 9: segs.push_back({bottom(), top()}); break;
        case 7: case 8: segs.push_back({left(), top()}); break;
        case 5:
          segs.push_back({bottom(), left()});
          segs.push_back({top(), right()});
          break;
        case 10:
          segs.push_back({bottom(), right()});
          segs.push_back({left(), top()});
          break;
      }
    }

  // chain segments into polylines
  std::vector<bool> used(segs.size(), false);
  auto close_to = [](const std::array<double, 2>& a, const std::array<double, 2>& b) {
    return std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]) < 1e-12;
  };
  for (size_t i = 0; i < segs.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    Contour c;
    c.points.push_back(segs[i].a);
    c.points.push_back(segs[i].b);
    bool extended = true;
    while (extended) {
      extended = false;
      for (size_t j = 0; j < segs.size(); ++j) {
        if (used[j]) continue;
        if (close_to(c.points.back(), segs[j].a)) {
          c.points.push_back(segs[j].b);
        } else if (close_to(c.points.back(), segs[j].b)) {
          c.points.push_back(segs[j].a);
        } else if (close_to(c.points.front(), segs[j].a)) {
          c.points.insert(c.points.begin(), segs[j].b);
        } else if (close_to(c.points.front(), segs[j].b)) {
          c.points.insert(c.points.begin(), segs[j].a);
        } else {
          continue;
        }
        used[j] = true;
        extended = true;
      }
    }
    c.closed = close_to(c.points.front(), c.points.back());
    if (c.closed && c.points.size() > 1) c.points.pop_back();
    set.contours.push_back(std::move(c));
  }
  std::sort(set.contours.begin(), set.contours.end(), [](const Contour& x, const Contour& y) {
    if (x.closed != y.closed) return x.closed;
    return x.area() > y.area();
  });
  set.fragmented = set.contours.size() != 1 || !set.contours.front().closed;
  return set;
}

}  // namespace krc
