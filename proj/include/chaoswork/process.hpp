#pragma once

#include <string>
#include <string_view>

#include "chaoswork/errors.hpp"
#include "chaoswork/potentials.hpp"
#include "chaoswork/systems.hpp"

namespace chaoswork {

/// Ramp g(t) multiplying the perturbation.
enum class ScheduleKind {
  linear,  ///< g(t) = t / tau; g = 1 for tau = 0
  frozen,  ///< g(t) = 1; integrator checks on an autonomous Hamiltonian
};

inline double schedule_value(ScheduleKind kind, double t, double tau) {
  switch (kind) {
    case ScheduleKind::linear: return tau > 0.0 ? t / tau : 1.0;  // tau = 0: sudden switch
    case ScheduleKind::frozen: return 1.0;
  }
  return 0.0;
}

inline std::string_view to_string(ScheduleKind kind) {
  return kind == ScheduleKind::linear ? "linear" : "frozen";
}

inline ScheduleKind parse_schedule(std::string_view name) {
  if (name == "linear") return ScheduleKind::linear;
  if (name == "frozen") return ScheduleKind::frozen;
  throw ConfigError("process.schedule", "unknown schedule '" + std::string(name) + "'");
}

/// Driving protocol: H_t(z) = H0(z) + g(t) V(q) for 0 <= t <= tau.
template <Perturbation P>
struct ProcessSpec {
  double tau = 0.1;
  P potential;
  ScheduleKind schedule = ScheduleKind::linear;

  void validate() const {
    if (!(tau > 0.0)) throw ContractError("ProcessSpec: tau must be positive");
  }

  double ramp(double t) const { return schedule_value(schedule, t, tau); }
  double final_ramp() const { return ramp(tau); }
};

template <PhaseSpaceSystem S, Perturbation P>
  requires(S::dim == P::dim)
double hamiltonian_value(const S& sys, const PhasePoint<S::dim>& z, double t,
                         const ProcessSpec<P>& process) {
  if (!sys.contains(z.q)) throw DomainError("hamiltonian_value: position outside the domain");
  return unperturbed_energy(sys, z) + process.ramp(t) * process.potential.value(z.q);
}

/// H_tau(z), the Hamiltonian at the end of the process.
template <PhaseSpaceSystem S, Perturbation P>
  requires(S::dim == P::dim)
double final_hamiltonian(const S& sys, const PhasePoint<S::dim>& z, const ProcessSpec<P>& process) {
  return hamiltonian_value(sys, z, process.tau, process);
}

}  // namespace chaoswork
