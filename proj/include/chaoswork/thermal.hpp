#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>

#include "chaoswork/errors.hpp"
#include "chaoswork/parallel.hpp"
#include "chaoswork/phase_point.hpp"
#include "chaoswork/process.hpp"
#include "chaoswork/rng.hpp"
#include "chaoswork/systems.hpp"

namespace chaoswork {

/// Inverse temperature and effective Planck constant. The mass belongs to the
/// system, which owns the kinetic term.
struct ThermalParams {
  double beta = 1.0 / 256.0;
  double hbar = 1.0;

  void validate() const {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw ContractError("ThermalParams: beta must be positive");
    if (!(hbar > 0.0) || !std::isfinite(hbar)) throw ContractError("ThermalParams: hbar must be positive");
  }
};

/// Draw i of the Gibbs density exp(-beta H0) / Z0: q from the system's position
/// marginal, each momentum component Gaussian with variance m / beta.
template <PhaseSpaceSystem S>
PhasePoint<S::dim> sample_gibbs(const S& sys, const ThermalParams& thermal, const SampleStream& stream,
                                std::size_t i) {
  auto gen = stream.engine(i);
  PhasePoint<S::dim> z;
  z.q = sys.sample_position(gen, thermal.beta);
  std::normal_distribution<double> normal(0.0, std::sqrt(sys.mass() / thermal.beta));
  for (auto& pk : z.p) pk = normal(gen);
  return z;
}

struct FreeEnergyEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
};

/// Delta F = -ln <exp(-beta V(q))> / beta over the unperturbed position
/// marginal. Kinetic factors cancel between Z_tau and Z_0.
template <PhaseSpaceSystem S, Perturbation P>
  requires(S::dim == P::dim)
FreeEnergyEstimate classical_free_energy_difference(const S& sys, const ProcessSpec<P>& process,
                                                    double beta, std::size_t n_samples,
                                                    const SampleStream& stream,
                                                    const ParallelOptions& par = {}) {
  if (n_samples < 1) throw ContractError("classical_free_energy_difference: n_samples must be >= 1");
  if (!(beta > 0.0)) throw ContractError("classical_free_energy_difference: beta must be positive");
  const SampleStream positions = stream.with_salt(salts::kFreeEnergy);
  const double g = process.final_ramp();
  struct Sums {
    double s = 0.0;
    double s2 = 0.0;
  };
  auto parts = map_chunks(n_samples, par, [&](std::size_t, std::size_t b, std::size_t e) {
    Sums acc;
    for (std::size_t i = b; i < e; ++i) {
      auto gen = positions.engine(i);
      const double x = std::exp(-beta * g * process.potential.value(sys.sample_position(gen, beta)));
      acc.s += x;
      acc.s2 += x * x;
    }
    return acc;
  });
  const Sums tot = pairwise_reduce(std::move(parts), [](Sums a, Sums b) {
    return Sums{a.s + b.s, a.s2 + b.s2};
  });
  const double n = static_cast<double>(n_samples);
  const double mean = tot.s / n;
  if (!(mean > 0.0) || !std::isfinite(mean)) {
    throw OverflowError("classical_free_energy_difference: <exp(-beta V)> is not a positive finite number");
  }
  const double var = n > 1.0 ? std::max(0.0, (tot.s2 - n * mean * mean) / (n - 1.0)) : 0.0;
  FreeEnergyEstimate out;
  out.value = -std::log(mean) / beta;
  out.std_error = std::sqrt(var / n) / (beta * mean);
  out.n_samples = n_samples;
  return out;
}

/// g0 = integral of delta(E - |p|^2/2m) over the billiard phase space, 2 pi m Area.
inline double density_of_states_billiard(const StadiumGeometry& geom, double mass) {
  geom.validate();
  if (!(mass > 0.0)) throw ContractError("density_of_states_billiard: mass must be positive");
  return 2.0 * std::numbers::pi * mass * geom.area();
}

/// Weyl mean level spacing (2 pi hbar)^2 / g0.
inline double mean_level_spacing(const StadiumGeometry& geom, double mass, double hbar = 1.0) {
  const double h = 2.0 * std::numbers::pi * hbar;
  return h * h / density_of_states_billiard(geom, mass);
}

}  // namespace chaoswork
