#pragma once

#include <atomic>
#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include "krc/gaussian.hpp"
#include "krc/operators.hpp"
#include "krc/orbit.hpp"

namespace krc {

struct PropagationPlan {
  ControlScheme scheme = ControlScheme::SolA;
  ControlOrbit orbit;
  int l = 0;                 ///< number of full steps; equals orbit.tau when shifting
  bool apply_shifts = true;
  int unwind_period = 1;     ///< steps between unwindings (UnwindM only)

  void validate() const {
    if (l < 0) throw config_error("propagation length l must be >= 0");
    if (apply_shifts && l != orbit.tau)
      throw config_error("apply_shifts requires l == orbit.tau");
    if (l > orbit.tau) throw config_error("l exceeds orbit length");
    if (unwind_period < 1) throw config_error("unwind_period must be >= 1");
  }
};

struct PropagationResult {
  Vec final_state;
  double delta = 0.0;          ///< 1 - |<target|final>|^2
  std::vector<Vec> trace;      ///< state after the entry shift and each full step
};

namespace detail {

/// Accumulated on-orbit uncontrolled stability matrix over steps
/// [first, first+count).
inline StabilityMatrix accumulated_stability(const ControlOrbit& orbit, int first, int count,
                                             const KickedRotorParams& params) {
  StabilityMatrix m;
  for (int k = 0; k < count; ++k)
    m = stability_step_uncontrolled(orbit.at(first + k).q, params) * m;
  return m;
}

}  // namespace detail

/// Controlled propagation: entry shift onto the orbit, l full steps of the
/// scheme's unitaries, exit shift onto the target centroid. Returns the
/// fidelity deviation and the per-step trace.
inline PropagationResult propagate(const PropagationPlan& plan, const Vec& initial,
                                   const Vec& target, const TorusQuantization& tq,
                                   const Fourier& fourier) {
  plan.validate();
  if (initial.size() != tq.N || target.size() != tq.N)
    throw config_error("propagate: state dimension does not match quantization");
  KickedRotorParams params{plan.orbit.K, tq.S};

  PropagationResult res;
  Vec psi = initial;
  if (plan.apply_shifts) {
    auto c = measure_centroid(psi, tq, fourier);
    double dq = reduce_centered(plan.orbit.at(0).q - c.q_c, 1.0);
    double dp = reduce_centered(plan.orbit.at(0).p - c.p_c, tq.S);
    shift_operator(tq, dq, dp, c.q_c, c.p_c).apply_in_place(fourier, psi);
  }
  res.trace.push_back(psi);

  for (int n = 0; n < plan.l; ++n) {
    switch (plan.scheme) {
      case ControlScheme::SolA:
      case ControlScheme::SolAImproved:
      case ControlScheme::SolB:
      case ControlScheme::SolBImproved: {
        auto [u1, u2] = controlled_half_steps(tq, plan.orbit, plan.scheme, n);
        u1.apply_in_place(fourier, psi);
        u2.apply_in_place(fourier, psi);
        break;
      }
      case ControlScheme::Uncontrolled: {
        floquet_uncontrolled(tq, params).apply_in_place(fourier, psi);
        break;
      }
      case ControlScheme::UnwindM: {
        floquet_uncontrolled(tq, params).apply_in_place(fourier, psi);
        if ((n + 1) % plan.unwind_period == 0) {
          int first = n + 1 - plan.unwind_period;
          StabilityMatrix m =
              detail::accumulated_stability(plan.orbit, first, plan.unwind_period, params);
          unwind_operator(tq, m, plan.orbit.at(n + 1).q, plan.orbit.at(n + 1).p)
              .apply_in_place(fourier, psi);
        }
        break;
      }
    }
    if (std::abs(psi.norm() - 1.0) > 1e-9)
      throw numerical_error("propagate: norm drifted beyond 1e-9");
    res.trace.push_back(psi);
  }

  if (plan.apply_shifts) {
    auto ct = measure_centroid(target, tq, fourier);
    const PhasePoint& xe = plan.orbit.at(plan.l);
    double dq = reduce_centered(ct.q_c - xe.q, 1.0);
    double dp = reduce_centered(ct.p_c - xe.p, tq.S);
    shift_operator(tq, dq, dp, xe.q, xe.p).apply_in_place(fourier, psi);
  }
  res.final_state = psi;
  res.delta = 1.0 - fidelity(target, psi);
  return res;
}

struct SweepRow {
  int N = 0;
  double h = 0.0;  ///< Planck constant 2 pi hbar = S/N
  ControlScheme scheme = ControlScheme::SolA;
  double delta = 0.0;
  std::string status = "ok";
};

/// Fidelity deviation over a list of dimensions and schemes. Jobs are
/// independent (one quantization, one propagation each) and distributed over
/// `workers` threads; results are merged by index so output order and
/// content do not depend on the worker count.
inline std::vector<SweepRow> sweep_dimension(const std::vector<int>& dimensions,
                                             const std::vector<ControlScheme>& schemes,
                                             const ControlOrbit& orbit,
                                             const WavePacketSpec& alpha,
                                             const WavePacketSpec& beta, double S,
                                             int unwind_period = 1, int workers = 1) {
  for (size_t i = 1; i < dimensions.size(); ++i)
    if (dimensions[i] <= dimensions[i - 1])
      throw config_error("sweep_dimension: dimensions must be sorted ascending");
  std::vector<SweepRow> rows(dimensions.size() * schemes.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= rows.size()) return;
      int N = dimensions[i / schemes.size()];
      ControlScheme scheme = schemes[i % schemes.size()];
      SweepRow row;
      row.N = N;
      row.scheme = scheme;
      row.h = S / static_cast<double>(N);
      try {
        TorusQuantization tq(N, S);
        Fourier fourier(tq);
        Vec a = build_gaussian(alpha, tq);
        Vec b = build_gaussian(beta, tq);
        PropagationPlan plan{scheme, orbit, orbit.tau, true, unwind_period};
        row.delta = propagate(plan, a, b, tq, fourier).delta;
      } catch (const std::exception& e) {
        row.delta = std::nan("");
        row.status = e.what();
      }
      rows[i] = row;
    }
  };
  int nw = std::max(1, std::min<int>(workers, static_cast<int>(rows.size())));
  if (nw == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(nw));
    for (int t = 0; t < nw; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return rows;
}

}  // namespace krc
