#pragma once

// Semiclassical characteristic function from the dephasing representation:
//
//   G(u) = < exp((i / hbar) dS(z0, u hbar)) >_Gibbs,
//   dS(z0, s) = int_0^s [H_tau(z_tau(z0(s'))) - H_0(z0(s'))] ds',
//
// where z0(s') is the unperturbed flow and z_tau pushes a point through the
// whole driven process. The integrand is the classical two-point work of the
// point z0(s'), so one driven trajectory per s-node is all it costs.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "chaoswork/dynamics.hpp"
#include "chaoswork/errors.hpp"
#include "chaoswork/parallel.hpp"
#include "chaoswork/rng.hpp"
#include "chaoswork/thermal.hpp"

namespace chaoswork {

using complex = std::complex<double>;

/// Uniform grid 0 = u_0 < ... < u_{n-1} = u_max.
struct UGrid {
  double u_max = 0.5;
  std::size_t n_points = 2048;

  void validate() const {
    if (n_points < 2) throw ContractError("UGrid: n_points must be >= 2");
    if (!(u_max > 0.0) || !std::isfinite(u_max)) throw ContractError("UGrid: u_max must be positive");
  }
  double du() const { return u_max / static_cast<double>(n_points - 1); }
  double u(std::size_t k) const {
    return k + 1 == n_points ? u_max : static_cast<double>(k) * du();
  }
  std::vector<double> values() const {
    std::vector<double> out(n_points);
    for (std::size_t k = 0; k < n_points; ++k) out[k] = u(k);
    return out;
  }
};

/// Sampled G(u). `batch_sums` / `batch_counts` keep the per-chunk phase sums
/// of a Monte Carlo estimate so callers can bootstrap over batches.
struct CharFunc {
  std::vector<double> u;
  std::vector<complex> g;
  std::vector<double> std_error;
  std::size_t n_samples = 0;
  std::size_t n_failed = 0;
  std::vector<std::vector<complex>> batch_sums;
  std::vector<std::size_t> batch_counts;

  std::size_t size() const { return u.size(); }
};

// ---------------------------------------------------------------------------
// Action differences
// ---------------------------------------------------------------------------

namespace detail {

inline void check_nodes(const std::vector<double>& s_nodes) {
  if (s_nodes.empty() || s_nodes.front() != 0.0) {
    throw ContractError("action difference: s_nodes must start at 0");
  }
}

// Cumulative integral of the piecewise-linear interpolant through the values
// at nodes 0, stride, 2 stride, ..., n-1. With stride 1 this is the plain
// cumulative trapezoid rule on the nodes.
template <class F>
std::vector<double> cumulative_integral(const std::vector<double>& s, std::size_t stride, F&& integrand,
                                        double* first_value = nullptr) {
  const std::size_t n = s.size();
  stride = std::max<std::size_t>(1, stride);
  std::vector<double> f(n);
  std::size_t prev = 0;
  f[0] = integrand(0);
  if (first_value) *first_value = f[0];
  for (std::size_t k = stride;; k += stride) {
    const std::size_t j = std::min(k, n - 1);
    if (j == prev) break;
    f[j] = integrand(j);
    const double span = s[j] - s[prev];
    for (std::size_t m = prev + 1; m < j; ++m) {
      const double w = (s[m] - s[prev]) / span;
      f[m] = (1.0 - w) * f[prev] + w * f[j];
    }
    prev = j;
    if (j == n - 1) break;
  }
  std::vector<double> out(n);
  out[0] = 0.0;
  for (std::size_t m = 1; m < n; ++m) {
    out[m] = out[m - 1] + 0.5 * (s[m] - s[m - 1]) * (f[m] + f[m - 1]);
  }
  return out;
}

}  // namespace detail

/// dS(z0, s) at every node (cumulative trapezoid). Negative, decreasing nodes
/// integrate backwards along the unperturbed flow. `stride` > 1 evaluates the
/// integrand on every stride-th node only and interpolates linearly between.
template <PhaseSpaceSystem S, Perturbation P>
  requires(S::dim == P::dim)
std::vector<double> action_difference(const S& sys, const ProcessSpec<P>& process,
                                      const PhasePoint<S::dim>& z0, const std::vector<double>& s_nodes,
                                      double dt = 0.0, std::size_t stride = 1,
                                      double* work_at_origin = nullptr) {
  detail::check_nodes(s_nodes);
  return detail::cumulative_integral(
      s_nodes, stride,
      [&](std::size_t k) {
        try {
          return classical_work(sys, sys.free_flight(z0, s_nodes[k]), process, dt);
        } catch (const NumericalFailure& e) {
          throw NodeFailure(e, k);
        }
      },
      work_at_origin);
}

/// Quench variant: z_tau is the identity, so the integrand is V(q0(s)).
template <PhaseSpaceSystem S, Perturbation P>
  requires(S::dim == P::dim)
std::vector<double> quench_action_difference(const S& sys, const P& potential,
                                             const PhasePoint<S::dim>& z0,
                                             const std::vector<double>& s_nodes,
                                             std::size_t stride = 1,
                                             double* value_at_origin = nullptr) {
  detail::check_nodes(s_nodes);
  return detail::cumulative_integral(
      s_nodes, stride,
      [&](std::size_t k) {
        try {
          return potential.value(sys.free_flight(z0, s_nodes[k]).q);
        } catch (const NumericalFailure& e) {
          throw NodeFailure(e, k);
        }
      },
      value_at_origin);
}

// ---------------------------------------------------------------------------
// Monte Carlo estimator
// ---------------------------------------------------------------------------

enum class ActionKind { finite_time, quench };
enum class Direction { forward, backward };

struct SemiclassicalOptions {
  double dt = 0.0;  ///< driven RK4 step; <= 0 selects tau / 1000
  ActionKind action = ActionKind::finite_time;
  Direction direction = Direction::forward;
  /// Largest spacing in s between integrand evaluations; 0 evaluates at every
  /// u-node. Larger spacings are never introduced, only skipped nodes.
  double s_step_max = 0.0;
  double failure_budget = 1e-3;
  bool record_works = false;  ///< keep the s = 0 integrand (classical work) per sample
  ParallelOptions parallel;
};

struct SemiclassicalResult {
  CharFunc cf;  ///< on the grid u_k (forward) or -u_k (backward), in k order
  /// Classical work W(z0) (the s = 0 integrand) per sample, NaN where the
  /// sample failed. Only filled when record_works is set.
  std::vector<double> works;
  std::size_t stride = 1;
};

/// Node stride giving integrand spacing no larger than s_step_max.
inline std::size_t integrand_stride(const UGrid& grid, double hbar, double s_step_max) {
  if (!(s_step_max > 0.0)) return 1;
  const double ds = grid.du() * hbar;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(s_step_max / ds + 1e-9)));
}

template <PhaseSpaceSystem S, Perturbation P>
  requires(S::dim == P::dim)
SemiclassicalResult char_func_semiclassical(const S& sys, const ProcessSpec<P>& process,
                                            const ThermalParams& thermal, const UGrid& grid,
                                            std::size_t n_samples, const SampleStream& stream,
                                            const SemiclassicalOptions& opt = {}) {
  thermal.validate();
  grid.validate();
  process.validate();
  if (n_samples < 1) throw ContractError("char_func_semiclassical: n_samples must be >= 1");

  const std::size_t n = grid.n_points;
  const double sign = opt.direction == Direction::forward ? 1.0 : -1.0;
  std::vector<double> s_nodes(n);
  for (std::size_t k = 0; k < n; ++k) s_nodes[k] = sign * grid.u(k) * thermal.hbar;
  const std::size_t stride = integrand_stride(grid, thermal.hbar, opt.s_step_max);
  const SampleStream ic = stream.with_salt(salts::kInitialConditions);
  const double inv_hbar = 1.0 / thermal.hbar;

  struct Chunk {
    std::vector<complex> sums;
    std::size_t count = 0;
    std::size_t failed = 0;
    std::vector<double> works;
  };

  auto chunks = map_chunks(n_samples, opt.parallel, [&](std::size_t, std::size_t b, std::size_t e) {
    Chunk c;
    c.sums.assign(n, complex(0.0, 0.0));
    if (opt.record_works) c.works.assign(e - b, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = b; i < e; ++i) {
      const auto z0 = sample_gibbs(sys, thermal, ic, i);
      std::vector<double> ds;
      double w0 = 0.0;
      try {
        ds = opt.action == ActionKind::finite_time
                 ? action_difference(sys, process, z0, s_nodes, opt.dt, stride, &w0)
                 : quench_action_difference(sys, process.potential, z0, s_nodes, stride, &w0);
      } catch (const NumericalFailure&) {
        ++c.failed;
        continue;
      } catch (const DomainError&) {
        ++c.failed;
        continue;
      }
      for (std::size_t k = 0; k < n; ++k) {
        const double phase = ds[k] * inv_hbar;
        c.sums[k] += complex(std::cos(phase), std::sin(phase));
      }
      if (opt.record_works) c.works[i - b] = w0;
      ++c.count;
    }
    return c;
  });

  SemiclassicalResult res;
  res.stride = stride;
  CharFunc& cf = res.cf;
  cf.u.resize(n);
  for (std::size_t k = 0; k < n; ++k) cf.u[k] = sign * grid.u(k);
  std::size_t failed = 0;
  for (const auto& c : chunks) {
    failed += c.failed;
    cf.batch_sums.push_back(c.sums);
    cf.batch_counts.push_back(c.count);
    if (opt.record_works) res.works.insert(res.works.end(), c.works.begin(), c.works.end());
  }
  cf.n_failed = failed;
  if (static_cast<double>(failed) > opt.failure_budget * static_cast<double>(n_samples)) {
    throw FailureBudgetExceeded("char_func_semiclassical: " + std::to_string(failed) + " of " +
                                    std::to_string(n_samples) + " trajectories failed",
                                failed, n_samples);
  }

  struct Tot {
    std::vector<complex> sums;
    std::size_t count = 0;
  };
  std::vector<Tot> parts;
  parts.reserve(chunks.size());
  for (auto& c : chunks) parts.push_back({std::move(c.sums), c.count});
  const Tot tot = pairwise_reduce(std::move(parts), [](Tot a, Tot b) {
    for (std::size_t k = 0; k < a.sums.size(); ++k) a.sums[k] += b.sums[k];
    a.count += b.count;
    return a;
  });
  cf.n_samples = tot.count;
  if (tot.count == 0) throw FailureBudgetExceeded("char_func_semiclassical: every trajectory failed", failed, n_samples);
  const double cnt = static_cast<double>(tot.count);
  cf.g.resize(n);
  cf.std_error.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    cf.g[k] = tot.sums[k] / cnt;
    const double spread = std::max(0.0, 1.0 - std::norm(cf.g[k]));
    cf.std_error[k] = tot.count > 1 ? std::sqrt(spread / (cnt - 1.0)) : 0.0;
  }
  return res;
}

/// Extends G from u >= 0 to the symmetric grid with G(-u) = conj(G(u)).
inline CharFunc hermitian_extend(const CharFunc& half) {
  const std::size_t n = half.size();
  if (n == 0 || half.u.front() != 0.0) throw ContractError("hermitian_extend: grid must start at u = 0");
  for (std::size_t k = 1; k < n; ++k) {
    if (!(half.u[k] > half.u[k - 1])) throw ContractError("hermitian_extend: grid must be ascending");
  }
  const bool has_err = half.std_error.size() == n;
  CharFunc out;
  out.n_samples = half.n_samples;
  out.n_failed = half.n_failed;
  out.u.reserve(2 * n - 1);
  out.g.reserve(2 * n - 1);
  for (std::size_t k = n - 1; k >= 1; --k) {
    out.u.push_back(-half.u[k]);
    out.g.push_back(std::conj(half.g[k]));
    if (has_err) out.std_error.push_back(half.std_error[k]);
  }
  for (std::size_t k = 0; k < n; ++k) {
    out.u.push_back(half.u[k]);
    out.g.push_back(half.g[k]);
    if (has_err) out.std_error.push_back(half.std_error[k]);
  }
  return out;
}

/// Bootstrap replicate of a batched estimate: batches drawn with replacement
/// and pooled. Replicate r is a pure function of (stream, r).
inline CharFunc bootstrap_replicate(const CharFunc& cf, const SampleStream& stream, std::size_t r) {
  const std::size_t nb = cf.batch_sums.size();
  if (nb == 0) throw ContractError("bootstrap_replicate: estimate carries no batches");
  auto gen = stream.with_salt(salts::kBootstrap).engine(r);
  std::uniform_int_distribution<std::size_t> pick(0, nb - 1);
  std::vector<complex> sums(cf.size(), complex(0.0, 0.0));
  std::size_t count = 0;
  for (std::size_t b = 0; b < nb; ++b) {
    const std::size_t j = pick(gen);
    for (std::size_t k = 0; k < sums.size(); ++k) sums[k] += cf.batch_sums[j][k];
    count += cf.batch_counts[j];
  }
  CharFunc out;
  out.u = cf.u;
  out.n_samples = count;
  out.g.resize(sums.size());
  for (std::size_t k = 0; k < sums.size(); ++k) {
    out.g[k] = count > 0 ? sums[k] / static_cast<double>(count) : complex(1.0, 0.0);
  }
  return out;
}

}  // namespace chaoswork
