#pragma once

// Driven (time-dependent) evolution: fixed-step RK4 on Hamilton's equations
// for H_t = H0 + g(t) V, with hard walls handled by locating the crossing
// inside the offending step and bouncing specularly.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>

#include <boost/math/tools/toms748_solve.hpp>

#include "chaoswork/errors.hpp"
#include "chaoswork/phase_point.hpp"
#include "chaoswork/process.hpp"
#include "chaoswork/systems.hpp"

namespace chaoswork {

/// Step used when the caller passes dt <= 0.
template <Perturbation P>
double default_time_step(const ProcessSpec<P>& process) {
  return process.tau / 1000.0;
}

namespace detail {

inline constexpr int kMaxRootIterations = 64;
inline constexpr double kWallPositionTolerance = 1e-12;
inline constexpr int kMaxBouncesPerStep = 4096;

template <PhaseSpaceSystem S, Perturbation P>
struct HamiltonFlow {
  static constexpr std::size_t D = S::dim;
  const S& sys;
  const ProcessSpec<P>& process;
  double inv_mass;

  void derivative(const PhasePoint<D>& z, double t, PhasePoint<D>& dz) const {
    const double g = process.ramp(t);
    const Vec<D> gv = process.potential.gradient(z.q);
    const Vec<D> gu = sys.confining_gradient(z.q);
    for (std::size_t i = 0; i < D; ++i) {
      dz.q[i] = z.p[i] * inv_mass;
      dz.p[i] = -gu[i] - g * gv[i];
    }
  }

  PhasePoint<D> rk4(const PhasePoint<D>& z, double t, double h) const {
    PhasePoint<D> k1, k2, k3, k4, y;
    derivative(z, t, k1);
    for (std::size_t i = 0; i < D; ++i) {
      y.q[i] = z.q[i] + 0.5 * h * k1.q[i];
      y.p[i] = z.p[i] + 0.5 * h * k1.p[i];
    }
    derivative(y, t + 0.5 * h, k2);
    for (std::size_t i = 0; i < D; ++i) {
      y.q[i] = z.q[i] + 0.5 * h * k2.q[i];
      y.p[i] = z.p[i] + 0.5 * h * k2.p[i];
    }
    derivative(y, t + 0.5 * h, k3);
    for (std::size_t i = 0; i < D; ++i) {
      y.q[i] = z.q[i] + h * k3.q[i];
      y.p[i] = z.p[i] + h * k3.p[i];
    }
    derivative(y, t + h, k4);
    PhasePoint<D> out;
    for (std::size_t i = 0; i < D; ++i) {
      out.q[i] = z.q[i] + h / 6.0 * (k1.q[i] + 2.0 * (k2.q[i] + k3.q[i]) + k4.q[i]);
      out.p[i] = z.p[i] + h / 6.0 * (k1.p[i] + 2.0 * (k2.p[i] + k3.p[i]) + k4.p[i]);
    }
    return out;
  }

  struct WallCrossing {
    double h;
    int wall;
  };

  // First wall crossed by the RK4 sub-step from z, and the step length h at
  // which it is reached (inside end of a bracket narrower than
  // kWallPositionTolerance in position). Root finding runs on the one wall's
  // smooth signed distance; if the point found is still outside some other
  // wall, that wall was crossed first and the search repeats on [0, h].
  WallCrossing locate_wall(const PhasePoint<D>& z, double t, double h_out) const {
    const double speed = std::sqrt(norm2(z.p)) * inv_mass;
    auto converged = [&](double a, double b) {
      return std::abs(b - a) * speed <= kWallPositionTolerance;
    };
    for (int pass = 0; pass < 8; ++pass) {
      const int wall = sys.violated_wall(rk4(z, t, h_out).q);
      auto phi = [&](double h) { return sys.wall_signed_distance(wall, rk4(z, t, h).q); };
      double h_in = 0.0;
      double f_in = phi(0.0);
      const double f_out = phi(h_out);
      if (f_out >= 0.0) break;
      if (f_in <= 0.0) {
        // Starting on the wall. Moving outward: bounce now. Moving inward but
        // ending outside: the force bent the path back into the same wall,
        // so look for an interior point to bracket from.
        if (sys.reflect_off(z, wall).p != z.p) return {0.0, wall};
        h_in = h_out;
        for (int k = 0; k < 60 && f_in <= 0.0; ++k) {
          h_in *= 0.5;
          f_in = phi(h_in);
        }
        if (f_in <= 0.0) return {0.0, wall};
      }
      std::uintmax_t iterations = kMaxRootIterations;
      double h = 0.0;
      try {
        const auto [lo, hi] =
            boost::math::tools::toms748_solve(phi, h_in, h_out, f_in, f_out, converged, iterations);
        if (!converged(lo, hi) && iterations >= static_cast<std::uintmax_t>(kMaxRootIterations)) break;
        h = phi(lo) >= 0.0 ? lo : (phi(hi) >= 0.0 ? hi : h_in);
      } catch (const boost::math::evaluation_error&) {
        break;
      } catch (const std::domain_error&) {
        break;
      }
      if (sys.boundary_distance(rk4(z, t, h).q) >= -kWallPositionTolerance) return {h, wall};
      h_out = h;
    }
    throw NumericalFailure("driven_evolve: wall crossing not located", flatten(z), t);
  }

  // Advances z from t to t + h, bouncing off walls as needed.
  void advance(PhasePoint<D>& z, double t, double h) const {
    if constexpr (!S::has_walls) {
      z = rk4(z, t, h);
    } else {
      static_assert(WalledSystem<S>);
      double remaining = h;
      int stalled = 0;
      for (int bounce = 0; bounce < kMaxBouncesPerStep; ++bounce) {
        const PhasePoint<D> trial = rk4(z, t, remaining);
        const double d = sys.boundary_distance(trial.q);
        if (d >= 0.0) {
          z = trial;
          return;
        }
        if (!std::isfinite(d)) break;
        const WallCrossing hit = locate_wall(z, t, remaining);
        if (hit.h > 0.0) z = rk4(z, t, hit.h);
        const PhasePoint<D> bounced = sys.reflect_off(z, hit.wall);
        stalled = (hit.h > 0.0 || bounced.p != z.p) ? 0 : stalled + 1;
        if (stalled > 2) break;
        z = bounced;
        t += hit.h;
        remaining -= hit.h;
        if (remaining <= 0.0) return;
      }
      throw NumericalFailure("driven_evolve: stuck at a wall within one step", flatten(z), t);
    }
  }
};

}  // namespace detail

/// z_tau(z): integrates the driven process from t = 0 to t = tau with a fixed
/// step no larger than dt (dt <= 0 selects tau / 1000).
template <PhaseSpaceSystem S, Perturbation P>
  requires(S::dim == P::dim)
PhasePoint<S::dim> driven_evolve(const S& sys, PhasePoint<S::dim> z, const ProcessSpec<P>& process,
                                 double dt = 0.0) {
  process.validate();
  if (dt <= 0.0) dt = default_time_step(process);
  if (!sys.contains(z.q)) throw DomainError("driven_evolve: initial position outside the domain");
  const detail::HamiltonFlow<S, P> flow{sys, process, 1.0 / sys.mass()};
  const auto n_steps = static_cast<std::size_t>(std::ceil(process.tau / dt - 1e-9));
  const double h = process.tau / static_cast<double>(n_steps);
  for (std::size_t k = 0; k < n_steps; ++k) {
    flow.advance(z, static_cast<double>(k) * h, h);
  }
  if (!is_finite(z)) throw NumericalFailure("driven_evolve: non-finite state", flatten(z), process.tau);
  return z;
}

/// Classical two-point work W = H_tau(z_tau(z0)) - H0(z0).
template <PhaseSpaceSystem S, Perturbation P>
  requires(S::dim == P::dim)
double classical_work(const S& sys, const PhasePoint<S::dim>& z0, const ProcessSpec<P>& process,
                      double dt = 0.0) {
  const auto z_tau = driven_evolve(sys, z0, process, dt);
  return unperturbed_energy(sys, z_tau) + process.final_ramp() * process.potential.value(z_tau.q) -
         (unperturbed_energy(sys, z0) + process.ramp(0.0) * process.potential.value(z0.q));
}

}  // namespace chaoswork
