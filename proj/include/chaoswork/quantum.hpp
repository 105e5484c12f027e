#pragma once

// Exact two-point-measurement statistics for small driven quantum systems
// H_t = H0 + g(t) V, written in the H0 eigenbasis.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "chaoswork/errors.hpp"
#include "chaoswork/potentials.hpp"
#include "chaoswork/process.hpp"
#include "chaoswork/rng.hpp"
#include "chaoswork/semiclassical.hpp"
#include "chaoswork/work_distribution.hpp"

namespace chaoswork {

/// H0 eigenvalues (strictly ascending) and V in the H0 eigenbasis.
struct QuantumModel {
  std::string name = "explicit";
  Eigen::VectorXd e0;
  Eigen::MatrixXcd v;
  double hbar = 1.0;

  std::size_t dim() const { return static_cast<std::size_t>(e0.size()); }

  void validate() const {
    const auto n = e0.size();
    if (n < 1) throw ContractError("QuantumModel: empty spectrum");
    if (v.rows() != n || v.cols() != n) throw ContractError("QuantumModel: V must be N x N");
    if (!(hbar > 0.0)) throw ContractError("QuantumModel: hbar must be positive");
    for (Eigen::Index k = 1; k < n; ++k) {
      if (!(e0[k] > e0[k - 1])) throw ContractError("QuantumModel: H0 spectrum must be strictly ascending");
    }
    const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
    if ((v - v.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw ContractError("QuantumModel: V is not Hermitian");
    }
  }
};

/// Driving protocol with time measured in the model's units.
struct QuantumProcess {
  double tau = 1.0;
  ScheduleKind schedule = ScheduleKind::linear;
  std::size_t n_steps = 0;  ///< 0 selects default_quantum_steps

  double ramp(double t) const { return schedule_value(schedule, t, tau); }
};

// ---------------------------------------------------------------------------
// Built-in models
// ---------------------------------------------------------------------------

/// Particle in [0, L] with a Gaussian bump: sine basis, V_kl = (2/L) int sin sin V.
inline QuantumModel box_with_bump(std::size_t n, double length, double mass, const GaussianBump1D& bump,
                                  double hbar = 1.0) {
  if (n < 1) throw ContractError("box_with_bump: N must be >= 1");
  if (!(length > 0.0) || !(mass > 0.0)) throw ContractError("box_with_bump: length and mass must be positive");
  QuantumModel m;
  m.name = "box";
  m.hbar = hbar;
  m.e0.resize(static_cast<Eigen::Index>(n));
  m.v.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const double k1 = std::numbers::pi / length;
  for (std::size_t k = 0; k < n; ++k) {
    const double kk = k1 * static_cast<double>(k + 1);
    m.e0[static_cast<Eigen::Index>(k)] = hbar * hbar * kk * kk / (2.0 * mass);
  }
  // Split at the bump centre and at several widths around it so the adaptive
  // rule sees a smooth integrand on each piece.
  std::vector<double> cuts{0.0, length};
  for (int j = -4; j <= 4; ++j) {
    const double x = bump.center() + j * bump.width();
    if (x > 0.0 && x < length) cuts.push_back(x);
  }
  std::sort(cuts.begin(), cuts.end());
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = k; l < n; ++l) {
      const double a = k1 * static_cast<double>(k + 1);
      const double b = k1 * static_cast<double>(l + 1);
      auto f = [&](double x) { return std::sin(a * x) * std::sin(b * x) * bump.value({x}); };
      double s = 0.0;
      for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        s += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, cuts[c], cuts[c + 1], 12, 1e-14);
      }
      const double vkl = 2.0 / length * s;
      m.v(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) = vkl;
      m.v(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k)) = vkl;
    }
  }
  return m;
}

/// Oscillator H0 = p^2/2m + m w0^2 x^2/2 with V = stiffness x^2 / 2.
inline QuantumModel oscillator_ramp(std::size_t n, double omega0, double mass,
                                    const StiffnessPerturbation1D& pert, double hbar = 1.0) {
  if (n < 1) throw ContractError("oscillator_ramp: N must be >= 1");
  if (!(omega0 > 0.0) || !(mass > 0.0)) throw ContractError("oscillator_ramp: omega0 and mass must be positive");
  QuantumModel m;
  m.name = "oscillator";
  m.hbar = hbar;
  const auto nn = static_cast<Eigen::Index>(n);
  m.e0.resize(nn);
  m.v = Eigen::MatrixXcd::Zero(nn, nn);
  const double x2 = hbar / (2.0 * mass * omega0);  // <x^2> scale
  const double c = 0.5 * pert.stiffness() * x2;
  for (Eigen::Index k = 0; k < nn; ++k) {
    const double kd = static_cast<double>(k);
    m.e0[k] = hbar * omega0 * (kd + 0.5);
    m.v(k, k) = c * (2.0 * kd + 1.0);
    if (k + 2 < nn) {
      const double off = c * std::sqrt((kd + 1.0) * (kd + 2.0));
      m.v(k, k + 2) = off;
      m.v(k + 2, k) = off;
    }
  }
  return m;
}

/// Two levels {0, gap} with V = [[v00, v01], [conj(v01), v11]].
inline QuantumModel two_level(double gap, double v00, std::complex<double> v01, double v11, double hbar = 1.0) {
  if (!(gap > 0.0)) throw ContractError("two_level: gap must be positive");
  QuantumModel m;
  m.name = "two_level";
  m.hbar = hbar;
  m.e0.resize(2);
  m.e0 << 0.0, gap;
  m.v.resize(2, 2);
  m.v << v00, v01, std::conj(v01), v11;
  return m;
}

inline QuantumModel explicit_model(Eigen::VectorXd e0, Eigen::MatrixXcd v, double hbar = 1.0) {
  QuantumModel m;
  m.e0 = std::move(e0);
  m.v = std::move(v);
  m.hbar = hbar;
  m.validate();
  return m;
}

/// Random Hermitian V with i.i.d. complex Gaussian entries of the given scale
/// on top of the spectrum e0; draw r of the stream.
inline QuantumModel random_hermitian_model(const Eigen::VectorXd& e0, double scale, const SampleStream& stream,
                                           std::size_t r) {
  auto gen = stream.engine(r);
  std::normal_distribution<double> nd(0.0, scale);
  const auto n = e0.size();
  Eigen::MatrixXcd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = {nd(gen), nd(gen)};
  }
  Eigen::MatrixXcd v = 0.5 * (a + a.adjoint());
  QuantumModel m;
  m.name = "random";
  m.e0 = e0;
  m.v = v;
  return m;
}

// ---------------------------------------------------------------------------
// Dynamics
// ---------------------------------------------------------------------------

namespace detail {

inline double spectral_radius(const Eigen::MatrixXcd& v) {
  if (v.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(v, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace detail

/// About 10^3 RK4 steps per period of the fastest phase, at least 100.
inline std::size_t default_quantum_steps(const QuantumModel& model, const QuantumProcess& process) {
  const auto n = model.e0.size();
  const double spread = n > 0 ? model.e0[n - 1] - model.e0[0] : 0.0;
  const double omega = (spread + detail::spectral_radius(model.v)) / model.hbar;
  const double periods = omega * process.tau / (2.0 * std::numbers::pi);
  return std::max<std::size_t>(100, static_cast<std::size_t>(std::ceil(1000.0 * periods)));
}

/// Amplitudes a_l(t) in the H0 eigenbasis; column m of `a` started from |m>.
struct AmplitudeState {
  Eigen::MatrixXcd a;
  double t = 0.0;
  double max_norm_drift = 0.0;
  std::size_t n_steps = 0;
};

/// RK4 in the interaction picture b = exp(i E0 t / hbar) a, for the initial
/// states listed in `initial` (all of them when empty).
inline AmplitudeState evolve_amplitudes(const QuantumModel& model, const QuantumProcess& process,
                                        const std::vector<std::size_t>& initial = {}) {
  model.validate();
  if (!(process.tau >= 0.0)) throw ContractError("evolve_amplitudes: tau must be nonnegative");
  const auto n = static_cast<Eigen::Index>(model.dim());
  std::vector<std::size_t> cols = initial;
  if (cols.empty()) {
    cols.resize(model.dim());
    for (std::size_t i = 0; i < cols.size(); ++i) cols[i] = i;
  }
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(n, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (cols[c] >= model.dim()) throw ContractError("evolve_amplitudes: initial index out of range");
    b(static_cast<Eigen::Index>(cols[c]), static_cast<Eigen::Index>(c)) = 1.0;
  }
  AmplitudeState st;
  const std::size_t steps = process.tau == 0.0 ? 0
                            : process.n_steps > 0 ? process.n_steps
                                                  : default_quantum_steps(model, process);
  st.n_steps = steps;
  const double inv_hbar = 1.0 / model.hbar;
  const std::complex<double> mi(0.0, -inv_hbar);

  Eigen::VectorXcd phase(n);
  auto rhs = [&](double t, const Eigen::MatrixXcd& y) -> Eigen::MatrixXcd {
    for (Eigen::Index k = 0; k < n; ++k) phase[k] = std::polar(1.0, model.e0[k] * t * inv_hbar);
    const double g = process.ramp(t);
    Eigen::MatrixXcd tmp = phase.conjugate().asDiagonal() * y;
    tmp = model.v * tmp;
    return (mi * g) * (phase.asDiagonal() * tmp);
  };

  if (steps > 0) {
    const double h = process.tau / static_cast<double>(steps);
    for (std::size_t s = 0; s < steps; ++s) {
      const double t = static_cast<double>(s) * h;
      const Eigen::MatrixXcd k1 = rhs(t, b);
      const Eigen::MatrixXcd k2 = rhs(t + 0.5 * h, b + (0.5 * h) * k1);
      const Eigen::MatrixXcd k3 = rhs(t + 0.5 * h, b + (0.5 * h) * k2);
      const Eigen::MatrixXcd k4 = rhs(t + h, b + h * k3);
      b += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  st.t = process.tau;
  for (Eigen::Index k = 0; k < n; ++k) phase[k] = std::polar(1.0, -model.e0[k] * process.tau * inv_hbar);
  st.a = phase.asDiagonal() * b;
  for (Eigen::Index c = 0; c < st.a.cols(); ++c) {
    st.max_norm_drift = std::max(st.max_norm_drift, std::abs(st.a.col(c).norm() - 1.0));
  }
  if (st.max_norm_drift > 1e-6) {
    throw StepSizeError("evolve_amplitudes: norm drift " + std::to_string(st.max_norm_drift) +
                            " exceeds 1e-6; increase n_steps",
                        st.max_norm_drift);
  }
  return st;
}

/// Spectrum and eigenvectors of H_tau = diag(E0) + g(tau) V.
struct FinalBasis {
  Eigen::VectorXd e_tau;
  Eigen::MatrixXcd phi;  ///< column n = |phi_tau^n> in the H0 basis
};

inline FinalBasis final_basis(const QuantumModel& model, const QuantumProcess& process) {
  model.validate();
  Eigen::MatrixXcd h = process.ramp(process.tau) * model.v;
  h.diagonal() += model.e0.cast<std::complex<double>>();
  h = 0.5 * (h + h.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success) throw ContractError("final_basis: diagonalization failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

struct TransitionResult {
  Eigen::MatrixXd p;  ///< p(n, m) = P(n | m)
  FinalBasis basis;
  double max_norm_drift = 0.0;
  std::size_t n_steps = 0;
};

inline TransitionResult transition_probabilities(const QuantumModel& model, const QuantumProcess& process) {
  TransitionResult r;
  r.basis = final_basis(model, process);
  const AmplitudeState st = evolve_amplitudes(model, process);
  const Eigen::MatrixXcd c = r.basis.phi.adjoint() * st.a;
  r.p = c.cwiseAbs2();
  r.max_norm_drift = st.max_norm_drift;
  r.n_steps = st.n_steps;
  return r;
}

namespace detail {

inline double log_partition(const Eigen::VectorXd& e, double beta) {
  const double top = -beta * e.minCoeff();
  double s = 0.0;
  for (Eigen::Index k = 0; k < e.size(); ++k) s += std::exp(-beta * e[k] - top);
  return top + std::log(s);
}

}  // namespace detail

/// Atoms W = E_tau^n - E0^m with weights P(m) P(n|m); atoms closer than 1e-12
/// are merged and exactly-zero weights dropped. Log-weights are kept as well,
/// since P(m) underflows for high levels at large beta while P(m) e^{-beta W}
/// does not.
inline WorkDistribution quantum_work_distribution(const Eigen::VectorXd& e0, const TransitionResult& tr,
                                                  double beta) {
  if (!(beta > 0.0)) throw ContractError("quantum_work_distribution: beta must be positive");
  const double log_z0 = detail::log_partition(e0, beta);
  struct Atom {
    double w;
    double log_p;
  };
  std::vector<Atom> atoms;
  const auto n = e0.size();
  atoms.reserve(static_cast<std::size_t>(n * n));
  for (Eigen::Index m = 0; m < n; ++m) {
    const double log_pm = -beta * e0[m] - log_z0;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (tr.p(k, m) > 0.0) atoms.push_back({tr.basis.e_tau[k] - e0[m], log_pm + std::log(tr.p(k, m))});
    }
  }
  std::stable_sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.w < b.w; });
  WorkDistribution d;
  d.kind = DistKind::atoms;
  d.window = "atoms";
  for (const Atom& a : atoms) {
    if (!d.w.empty() && a.w - d.w.back() <= 1e-12) {
      double& l = d.log_weights.back();
      const double hi = std::max(l, a.log_p);
      l = hi + std::log(std::exp(l - hi) + std::exp(a.log_p - hi));
    } else {
      d.w.push_back(a.w);
      d.log_weights.push_back(a.log_p);
    }
  }
  d.weights.resize(d.log_weights.size());
  for (std::size_t j = 0; j < d.weights.size(); ++j) d.weights[j] = std::exp(d.log_weights[j]);
  return d;
}

inline WorkDistribution quantum_work_distribution(const QuantumModel& model, const QuantumProcess& process,
                                                  double beta) {
  return quantum_work_distribution(model.e0, transition_probabilities(model, process), beta);
}

/// G^Q(u) = sum_{n,m} P(m) P(n|m) exp(i u (E_tau^n - E0^m)).
inline CharFunc char_func_quantum(const WorkDistribution& atoms, const UGrid& grid) {
  if (atoms.kind != DistKind::atoms) throw ContractError("char_func_quantum: expects a discrete distribution");
  CharFunc cf = work_to_char(atoms, grid);
  cf.g[0] = complex(1.0, 0.0);
  return cf;
}

inline CharFunc char_func_quantum(const QuantumModel& model, const QuantumProcess& process, double beta,
                                  const UGrid& grid) {
  return char_func_quantum(quantum_work_distribution(model, process, beta), grid);
}

/// dF = -ln(Z_tau / Z_0) / beta from the two spectra.
inline double quantum_free_energy_difference(const Eigen::VectorXd& e0, const Eigen::VectorXd& e_tau, double beta) {
  if (!(beta > 0.0)) throw ContractError("quantum_free_energy_difference: beta must be positive");
  return -(detail::log_partition(e_tau, beta) - detail::log_partition(e0, beta)) / beta;
}

inline double quantum_free_energy_difference(const QuantumModel& model, const QuantumProcess& process, double beta) {
  return quantum_free_energy_difference(model.e0, final_basis(model, process).e_tau, beta);
}

}  // namespace chaoswork
