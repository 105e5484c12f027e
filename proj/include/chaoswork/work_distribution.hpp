#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <fftw3.h>

#include "chaoswork/dynamics.hpp"
#include "chaoswork/errors.hpp"
#include "chaoswork/parallel.hpp"
#include "chaoswork/rng.hpp"
#include "chaoswork/semiclassical.hpp"
#include "chaoswork/thermal.hpp"

namespace chaoswork {

enum class DistKind { density, atoms };

/// P(W): a density on a uniform W-grid, or weighted discrete atoms.
struct WorkDistribution {
  DistKind kind = DistKind::density;
  std::vector<double> w;
  std::vector<double> weights;
  double bin_width = 0.0;  ///< grid spacing (density only)
  /// Atoms only, optional: ln of each weight, for weights that underflow a
  /// double (deep Boltzmann tails) but still matter once multiplied by
  /// exp(-beta W). When present it is what jarzynski_check uses.
  std::vector<double> log_weights;

  // Transform metadata (density from char_to_work).
  std::string window = "none";
  double broadening = 0.0;      ///< std of the smoothing kernel in W units
  double min_before_clip = 0.0; ///< most negative value before clipping
  double clipped_mass = 0.0;    ///< integral of the clipped negative part
  double imag_residue = 0.0;    ///< max |Im P| / max |Re P| of the raw transform
  bool quality_ok = true;       ///< false when ringing went below -1e-3 max

  double total() const {
    double s = 0.0;
    for (double x : weights) s += x;
    return kind == DistKind::atoms ? s : s * bin_width;
  }
};

// ---------------------------------------------------------------------------
// Characteristic function -> density
// ---------------------------------------------------------------------------

enum class WindowKind { none, gaussian, hann };

struct Window {
  WindowKind kind = WindowKind::gaussian;
  /// Gaussian kernel std in W-bins (gaussian only).
  double broadening_bins = 2.0;
};

inline std::string_view to_string(WindowKind k) {
  switch (k) {
    case WindowKind::none: return "none";
    case WindowKind::gaussian: return "gaussian";
    case WindowKind::hann: return "hann";
  }
  return "none";
}

inline WindowKind parse_window(std::string_view name) {
  if (name == "none") return WindowKind::none;
  if (name == "gaussian") return WindowKind::gaussian;
  if (name == "hann") return WindowKind::hann;
  throw ConfigError("engine.window", "unknown window '" + std::string(name) + "'");
}

struct TransformOptions {
  Window window;
  /// Centre of the output W-grid, snapped to a multiple of the spacing.
  /// Unset: the mean work estimated from the phase slope at the first node.
  std::optional<double> w_center;
  /// Lowest W the output grid must contain; overrides w_center when set.
  std::optional<double> w_min;
  /// Clip negative ringing to zero and renormalize.
  bool clip = true;
};

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

inline bool is_hermitian(const CharFunc& cf) {
  const std::size_t n = cf.size();
  if (n < 3 || n % 2 == 0) return false;
  const std::size_t mid = n / 2;
  if (cf.u[mid] != 0.0) return false;
  for (std::size_t k = 0; k <= mid; ++k) {
    const std::size_t a = mid + k;
    const std::size_t b = mid - k;
    if (cf.u[a] != -cf.u[b] || cf.g[a] != std::conj(cf.g[b])) return false;
  }
  const double du = cf.u[mid + 1] - cf.u[mid];
  for (std::size_t k = 1; k < n; ++k) {
    if (std::abs(cf.u[k] - cf.u[k - 1] - du) > 1e-9 * du) return false;
  }
  return true;
}

inline double window_weight(const Window& w, double u, double u_max, double dw) {
  switch (w.kind) {
    case WindowKind::none: return 1.0;
    case WindowKind::hann: return 0.5 * (1.0 + std::cos(std::numbers::pi * u / u_max));
    case WindowKind::gaussian: {
      const double sigma_w = w.broadening_bins * dw;
      const double x = u * sigma_w;
      return std::exp(-0.5 * x * x);
    }
  }
  return 1.0;
}

}  // namespace detail

/// Inverse transform of a symmetric G on [-u_max, u_max] (2n - 1 points):
/// P(W_j) = (du / 2 pi) sum_k w(u_k) G(u_k) exp(-i u_k W_j) on the periodic
/// grid of M = 2(n - 1) points, spacing dW = pi / u_max. The +-u_max pair
/// enters once with weight Re G(u_max), which keeps the output exactly real.
inline WorkDistribution char_to_work(const CharFunc& cf, const TransformOptions& opt = {}) {
  if (!detail::is_hermitian(cf)) {
    throw ContractError("char_to_work: input must satisfy G(-u) = conj(G(u)) on a symmetric uniform grid");
  }
  const std::size_t half = cf.size() / 2;  // index of u = 0
  const std::size_t m = 2 * half;
  const double u_max = cf.u.back();
  const double du = u_max / static_cast<double>(half);
  const double dw = std::numbers::pi / u_max;
  const double span = dw * static_cast<double>(m);

  // Grid centre, a multiple of dW so that W = 0 is always a grid point.
  double wc_final = 0.0;
  if (opt.w_min) {
    wc_final = std::floor(*opt.w_min / dw) * dw + 0.5 * span;
  } else {
    const double centre = opt.w_center ? *opt.w_center : std::arg(cf.g[half + 1]) / du;
    wc_final = std::round(centre / dw) * dw;
  }

  fftw_complex* buf = fftw_alloc_complex(m);
  fftw_plan plan;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(m), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  // Entry for u = k' du, k' in [-half, half), stored at k' mod m.
  for (std::size_t j = 0; j < cf.size() - 1; ++j) {
    const long kp = static_cast<long>(j) - static_cast<long>(half);
    const double u = static_cast<double>(kp) * du;
    const double wt = detail::window_weight(opt.window, u, u_max, dw);
    complex v = wt * cf.g[j] * std::polar(1.0, -u * wc_final);
    if (j == 0) {
      const double u_top = u_max;
      const complex top = wt * cf.g.back() * std::polar(1.0, -u_top * wc_final);
      v = complex(0.5 * (v.real() + top.real()), 0.0);
    }
    const std::size_t idx = static_cast<std::size_t>((kp % static_cast<long>(m) + static_cast<long>(m)) %
                                                     static_cast<long>(m));
    buf[idx][0] = v.real();
    buf[idx][1] = v.imag();
  }
  fftw_execute(plan);

  WorkDistribution out;
  out.kind = DistKind::density;
  out.bin_width = dw;
  out.window = std::string(to_string(opt.window.kind));
  switch (opt.window.kind) {
    case WindowKind::none: out.broadening = 0.0; break;
    case WindowKind::gaussian: out.broadening = opt.window.broadening_bins * dw; break;
    // Kernel variance is -w''(0) = dW^2 / 2.
    case WindowKind::hann: out.broadening = dw / std::numbers::sqrt2; break;
  }
  out.w.resize(m);
  out.weights.resize(m);
  double max_re = 0.0;
  double max_im = 0.0;
  const double scale = du / (2.0 * std::numbers::pi);
  for (std::size_t j = 0; j < m; ++j) {
    const long jp = static_cast<long>(j) - static_cast<long>(half);
    const std::size_t idx = static_cast<std::size_t>((jp % static_cast<long>(m) + static_cast<long>(m)) %
                                                     static_cast<long>(m));
    out.w[j] = wc_final + static_cast<double>(jp) * dw;
    out.weights[j] = scale * buf[idx][0];
    max_re = std::max(max_re, std::abs(out.weights[j]));
    max_im = std::max(max_im, std::abs(scale * buf[idx][1]));
  }
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(buf);

  out.imag_residue = max_re > 0.0 ? max_im / max_re : 0.0;
  double vmin = 0.0;
  for (double x : out.weights) vmin = std::min(vmin, x);
  out.min_before_clip = vmin;
  out.quality_ok = vmin >= -1e-3 * max_re;
  if (opt.clip && vmin < 0.0) {
    double neg = 0.0;
    double total = 0.0;
    for (double& x : out.weights) {
      if (x < 0.0) {
        neg -= x;
        x = 0.0;
      }
      total += x;
    }
    out.clipped_mass = neg * dw;
    total *= dw;
    if (total > 0.0) {
      for (double& x : out.weights) x /= total;
    }
  }
  return out;
}

/// Forward transform of a distribution onto a u-grid: G(u_k) = int e^{i u W} dP.
/// Densities are treated as atoms of mass P_j dW at the grid points.
inline CharFunc work_to_char(const WorkDistribution& dist, const UGrid& grid) {
  grid.validate();
  CharFunc cf;
  cf.u = grid.values();
  cf.g.assign(grid.n_points, complex(0.0, 0.0));
  cf.std_error.assign(grid.n_points, 0.0);
  const double f = dist.kind == DistKind::density ? dist.bin_width : 1.0;
  for (std::size_t k = 0; k < grid.n_points; ++k) {
    complex s(0.0, 0.0);
    for (std::size_t j = 0; j < dist.w.size(); ++j) {
      s += dist.weights[j] * f * std::polar(1.0, cf.u[k] * dist.w[j]);
    }
    cf.g[k] = s;
  }
  cf.g[0] = complex(dist.total(), 0.0);
  return cf;
}

// ---------------------------------------------------------------------------
// Histograms and classical two-point statistics
// ---------------------------------------------------------------------------

struct ClassicalTwoPointSample {
  double e0 = 0.0;
  double e_tau = 0.0;
  double w = 0.0;
};

/// Binning rule: Freedman-Diaconis by default, or a fixed number of bins, or
/// bins of a given width aligned so that `origin` is a bin centre (used to
/// line a histogram up with a transform grid).
struct Binning {
  std::size_t count = 0;                ///< > 0: equal bins over [min, max]
  std::optional<double> width;          ///< aligned bins of this width
  double origin = 0.0;                  ///< a bin centre when width is set
  std::optional<double> lo, hi;         ///< range; defaults to the data range

  /// Without a width, data spread below this (relative, floor 1) is one bin.
  static constexpr double kDegenerateSpread = 1e-9;
};

namespace detail {

inline double quantile_sorted(const std::vector<double>& v, double p) {
  const double pos = p * static_cast<double>(v.size() - 1);
  const std::size_t i = static_cast<std::size_t>(std::floor(pos));
  const std::size_t j = std::min(i + 1, v.size() - 1);
  const double f = pos - static_cast<double>(i);
  return v[i] * (1.0 - f) + v[j] * f;
}

}  // namespace detail

/// Normalized histogram density of finite samples (NaN entries are skipped).
inline WorkDistribution histogram_density(const std::vector<double>& samples, const Binning& binning = {}) {
  std::vector<double> v;
  v.reserve(samples.size());
  for (double x : samples) {
    if (std::isfinite(x)) v.push_back(x);
  }
  if (v.empty()) throw ContractError("histogram_density: no finite samples");
  std::sort(v.begin(), v.end());
  const double lo = binning.lo.value_or(v.front());
  double hi = binning.hi.value_or(v.back());

  WorkDistribution out;
  out.kind = DistKind::density;
  out.window = "histogram";
  double width = 0.0;
  double first_centre = 0.0;
  std::size_t nb = 0;
  if (binning.width) {
    width = *binning.width;
    if (!(width > 0.0)) throw ContractError("histogram_density: bin width must be positive");
    const double j_lo = std::floor((lo - binning.origin) / width + 0.5);
    const double j_hi = std::floor((hi - binning.origin) / width + 0.5);
    first_centre = binning.origin + j_lo * width;
    nb = static_cast<std::size_t>(j_hi - j_lo) + 1;
  } else {
    // Spreads at the level of rounding noise count as a single value.
    if (hi - lo <= Binning::kDegenerateSpread * std::max(1.0, std::abs(lo))) hi = lo;
    if (binning.count > 0) {
      nb = binning.count;
    } else {
      const double iqr = detail::quantile_sorted(v, 0.75) - detail::quantile_sorted(v, 0.25);
      const double h = 2.0 * iqr / std::cbrt(static_cast<double>(v.size()));
      nb = h > 0.0 ? static_cast<std::size_t>(std::ceil((hi - lo) / h)) : 1;
      nb = std::clamp<std::size_t>(nb, 1, 100000);
    }
    if (hi > lo) {
      width = (hi - lo) / static_cast<double>(nb);
    } else {
      // Degenerate data: one bin of unit width centred on the value.
      width = 1.0;
      nb = 1;
    }
    first_centre = (hi > lo ? lo : lo - 0.5) + 0.5 * width;
  }
  out.bin_width = width;
  out.w.resize(nb);
  out.weights.assign(nb, 0.0);
  for (std::size_t j = 0; j < nb; ++j) out.w[j] = first_centre + static_cast<double>(j) * width;
  const double left = first_centre - 0.5 * width;
  std::size_t used = 0;
  for (double x : v) {
    const double pos = (x - left) / width;
    if (pos < 0.0 || pos > static_cast<double>(nb)) continue;
    const std::size_t j = std::min(nb - 1, static_cast<std::size_t>(pos));
    out.weights[j] += 1.0;
    ++used;
  }
  // Normalize by all finite samples so mass outside an explicit range shows up
  // as a deficit rather than being silently redistributed.
  const double norm = 1.0 / (static_cast<double>(v.size()) * width);
  for (double& x : out.weights) x *= norm;
  (void)used;
  return out;
}

struct ClassicalWorkOptions {
  double dt = 0.0;
  double failure_budget = 1e-3;
  ParallelOptions parallel;
};

/// Two-point samples (E0, E_tau, W) for Gibbs draws 0 .. n-1; failed
/// trajectories carry NaN in every field.
template <PhaseSpaceSystem S, Perturbation P>
  requires(S::dim == P::dim)
std::vector<ClassicalTwoPointSample> classical_two_point_samples(const S& sys, const ProcessSpec<P>& process,
                                                                 const ThermalParams& thermal,
                                                                 std::size_t n_samples,
                                                                 const SampleStream& stream,
                                                                 const ClassicalWorkOptions& opt = {}) {
  thermal.validate();
  process.validate();
  const SampleStream ic = stream.with_salt(salts::kInitialConditions);
  auto parts = map_chunks(n_samples, opt.parallel, [&](std::size_t, std::size_t b, std::size_t e) {
    std::vector<ClassicalTwoPointSample> out(e - b);
    for (std::size_t i = b; i < e; ++i) {
      const auto z0 = sample_gibbs(sys, thermal, ic, i);
      auto& s = out[i - b];
      try {
        const auto zt = driven_evolve(sys, z0, process, opt.dt);
        s.e0 = unperturbed_energy(sys, z0) + process.ramp(0.0) * process.potential.value(z0.q);
        s.e_tau = unperturbed_energy(sys, zt) + process.final_ramp() * process.potential.value(zt.q);
        s.w = s.e_tau - s.e0;
      } catch (const NumericalFailure&) {
        s.e0 = s.e_tau = s.w = std::numeric_limits<double>::quiet_NaN();
      }
    }
    return out;
  });
  std::vector<ClassicalTwoPointSample> all;
  all.reserve(n_samples);
  std::size_t failed = 0;
  for (auto& p : parts) {
    for (auto& s : p) {
      if (std::isnan(s.w)) ++failed;
      all.push_back(s);
    }
  }
  if (static_cast<double>(failed) > opt.failure_budget * static_cast<double>(n_samples)) {
    throw FailureBudgetExceeded("classical_two_point_samples: " + std::to_string(failed) + " of " +
                                    std::to_string(n_samples) + " trajectories failed",
                                failed, n_samples);
  }
  return all;
}

inline std::vector<double> works_of(const std::vector<ClassicalTwoPointSample>& samples) {
  std::vector<double> w(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) w[i] = samples[i].w;
  return w;
}

/// Classical P^C(W) as a normalized histogram of two-point samples.
template <PhaseSpaceSystem S, Perturbation P>
  requires(S::dim == P::dim)
WorkDistribution classical_work_distribution(const S& sys, const ProcessSpec<P>& process,
                                             const ThermalParams& thermal, std::size_t n_samples,
                                             const SampleStream& stream, const Binning& binning = {},
                                             const ClassicalWorkOptions& opt = {}) {
  if (binning.count != 0 && binning.count < 10) {
    throw ContractError("classical_work_distribution: at least 10 bins required");
  }
  const auto samples = classical_two_point_samples(sys, process, thermal, n_samples, stream, opt);
  return histogram_density(works_of(samples), binning);
}

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

/// Raw moment E[W^k], k = 0..4. Densities use the trapezoid rule.
inline double moments(const WorkDistribution& dist, int k) {
  if (k < 0 || k > 4) throw ContractError("moments: only k = 0..4 supported");
  auto pw = [k](double w) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= w;
    return r;
  };
  double s = 0.0;
  if (dist.kind == DistKind::atoms) {
    for (std::size_t j = 0; j < dist.w.size(); ++j) s += dist.weights[j] * pw(dist.w[j]);
    return s;
  }
  const std::size_t n = dist.w.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double f = (j == 0 || j + 1 == n) && n > 1 ? 0.5 : 1.0;
    s += f * dist.weights[j] * pw(dist.w[j]);
  }
  return s * dist.bin_width;
}

namespace detail {

// Density value at w by linear interpolation, zero outside the grid.
inline double density_at(const WorkDistribution& d, double w) {
  const std::size_t n = d.w.size();
  if (n == 0) return 0.0;
  const double pos = (w - d.w.front()) / d.bin_width;
  if (pos < -0.5 || pos > static_cast<double>(n) - 0.5) return 0.0;
  if (pos <= 0.0) return d.weights.front();
  if (pos >= static_cast<double>(n - 1)) return d.weights.back();
  const std::size_t i = static_cast<std::size_t>(pos);
  const double f = pos - static_cast<double>(i);
  return d.weights[i] * (1.0 - f) + d.weights[i + 1] * f;
}

}  // namespace detail

/// Histogram of work samples binned on the W-grid of `like` and sent through
/// the same band-limited transform (grid, window) that produced `like`, so the
/// two densities are compared at one resolution.
inline WorkDistribution resolution_matched_histogram(const std::vector<double>& works, const WorkDistribution& like,
                                                     const UGrid& grid, const TransformOptions& opt) {
  if (like.kind != DistKind::density || like.w.empty()) {
    throw ContractError("resolution_matched_histogram: reference must be a gridded density");
  }
  Binning b;
  b.width = like.bin_width;
  b.origin = like.w.front();
  const WorkDistribution h = histogram_density(works, b);
  WorkDistribution atoms = h;
  atoms.kind = DistKind::atoms;
  for (double& x : atoms.weights) x *= h.bin_width;
  return char_to_work(hermitian_extend(work_to_char(atoms, grid)), opt);
}

/// L1 distance. Two densities are compared on the finer of the two grids
/// (the other resampled linearly); atoms are compared as point masses
/// (positions equal within 1e-9 count as the same atom).
inline double l1_distance(const WorkDistribution& a, const WorkDistribution& b) {
  if (a.kind != b.kind) throw ContractError("l1_distance: both distributions must be of the same kind");
  if (a.kind == DistKind::atoms) {
    double s = 0.0;
    std::vector<bool> used(b.w.size(), false);
    for (std::size_t i = 0; i < a.w.size(); ++i) {
      double match = 0.0;
      for (std::size_t j = 0; j < b.w.size(); ++j) {
        if (!used[j] && std::abs(a.w[i] - b.w[j]) <= 1e-9) {
          match = b.weights[j];
          used[j] = true;
          break;
        }
      }
      s += std::abs(a.weights[i] - match);
    }
    for (std::size_t j = 0; j < b.w.size(); ++j) {
      if (!used[j]) s += std::abs(b.weights[j]);
    }
    return s;
  }
  const WorkDistribution& fine = a.bin_width <= b.bin_width ? a : b;
  const WorkDistribution& other = &fine == &a ? b : a;
  const double lo = std::min(a.w.front() - 0.5 * a.bin_width, b.w.front() - 0.5 * b.bin_width);
  const double hi = std::max(a.w.back() + 0.5 * a.bin_width, b.w.back() + 0.5 * b.bin_width);
  const double h = fine.bin_width;
  const double start = fine.w.front() - std::ceil((fine.w.front() - lo) / h) * h;
  double s = 0.0;
  for (double w = start; w <= hi + 0.5 * h; w += h) {
    s += std::abs(detail::density_at(fine, w) - detail::density_at(other, w));
  }
  return s * h;
}

// ---------------------------------------------------------------------------
// Jarzynski identity
// ---------------------------------------------------------------------------

struct JarzynskiReport {
  double lhs = 0.0;        ///< <exp(-beta W)>
  double rhs = 0.0;        ///< exp(-beta dF)
  double ratio = 0.0;      ///< lhs / rhs
  double std_error = 0.0;  ///< of the ratio
  double negative_work_probability = 0.0;
  double negative_work_share = 0.0;  ///< fraction of lhs carried by W < 0
};

namespace detail {

// log sum_j exp(log_c_j - beta W_j); entries with log_c_j = -inf are skipped.
inline double log_exp_average_log(const std::vector<double>& w, const std::vector<double>& log_c, double beta) {
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < w.size(); ++j) top = std::max(top, log_c[j] - beta * w[j]);
  if (!std::isfinite(top)) return top;
  double s = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) s += std::exp(log_c[j] - beta * w[j] - top);
  return top + std::log(s);
}

// log sum_j c_j exp(-beta W_j) for c_j >= 0.
inline double log_exp_average(const std::vector<double>& w, const std::vector<double>& c, double beta) {
  std::vector<double> log_c(c.size());
  for (std::size_t j = 0; j < c.size(); ++j) {
    log_c[j] = c[j] > 0.0 ? std::log(c[j]) : -std::numeric_limits<double>::infinity();
  }
  return log_exp_average_log(w, log_c, beta);
}

}  // namespace detail

/// <exp(-beta W)> against exp(-beta dF). The dominant error source is weight
/// at negative W, which exp(-beta W) amplifies; its share of the left-hand
/// side is reported. `replicates` (bootstrap copies of dist) give std_error.
inline JarzynskiReport jarzynski_check(const WorkDistribution& dist, double beta, double delta_f,
                                       const std::vector<WorkDistribution>& replicates = {}) {
  if (!(beta > 0.0)) throw ContractError("jarzynski_check: beta must be positive");
  auto log_lhs_of = [&](const WorkDistribution& d) {
    if (d.kind == DistKind::atoms && d.log_weights.size() == d.w.size() && !d.w.empty()) {
      return detail::log_exp_average_log(d.w, d.log_weights, beta);
    }
    std::vector<double> c = d.weights;
    if (d.kind == DistKind::density) {
      for (double& x : c) x = std::max(0.0, x) * d.bin_width;
    }
    return detail::log_exp_average(d.w, c, beta);
  };
  const double log_lhs = log_lhs_of(dist);
  const double log_ratio = log_lhs + beta * delta_f;
  if (!std::isfinite(log_lhs) || log_lhs > 700.0 || !std::isfinite(log_ratio) || std::abs(log_ratio) > 700.0) {
    throw OverflowError("jarzynski_check: <exp(-beta W)> not representable (log = " + std::to_string(log_lhs) +
                        "); beta is too large for the negative-work tail");
  }
  JarzynskiReport r;
  r.lhs = std::exp(log_lhs);
  r.rhs = std::exp(-beta * delta_f);
  r.ratio = std::exp(log_ratio);
  double neg_p = 0.0;
  double neg_l = 0.0;
  const double f = dist.kind == DistKind::density ? dist.bin_width : 1.0;
  const bool use_log = dist.kind == DistKind::atoms && dist.log_weights.size() == dist.w.size();
  for (std::size_t j = 0; j < dist.w.size(); ++j) {
    if (dist.w[j] < 0.0) {
      const double c = std::max(0.0, dist.weights[j]) * f;
      neg_p += c;
      neg_l += use_log ? std::exp(dist.log_weights[j] - beta * dist.w[j] - log_lhs)
                       : c * std::exp(-beta * dist.w[j] - log_lhs);
    }
  }
  r.negative_work_probability = neg_p;
  r.negative_work_share = neg_l;
  if (replicates.size() > 1) {
    double s = 0.0;
    double s2 = 0.0;
    for (const auto& rep : replicates) {
      const double x = std::exp(log_lhs_of(rep) + beta * delta_f);
      s += x;
      s2 += x * x;
    }
    const double n = static_cast<double>(replicates.size());
    const double mean = s / n;
    r.std_error = std::sqrt(std::max(0.0, (s2 - n * mean * mean) / (n - 1.0)));
  }
  return r;
}

/// Jarzynski from raw work samples (NaN skipped); std_error from the sample
/// variance of exp(-beta W).
inline JarzynskiReport jarzynski_from_samples(const std::vector<double>& works, double beta, double delta_f) {
  WorkDistribution d;
  d.kind = DistKind::atoms;
  for (double x : works) {
    if (std::isfinite(x)) d.w.push_back(x);
  }
  if (d.w.empty()) throw ContractError("jarzynski_from_samples: no finite samples");
  d.weights.assign(d.w.size(), 1.0 / static_cast<double>(d.w.size()));
  JarzynskiReport r = jarzynski_check(d, beta, delta_f);
  double s2 = 0.0;
  for (double x : d.w) {
    const double e = std::exp(-beta * x + beta * delta_f) - r.ratio;
    s2 += e * e;
  }
  const double n = static_cast<double>(d.w.size());
  r.std_error = n > 1.0 ? std::sqrt(s2 / (n - 1.0) / n) : 0.0;
  return r;
}

/// W at which the cumulative distribution first reaches p.
inline double quantile(const WorkDistribution& dist, double p) {
  const double f = dist.kind == DistKind::density ? dist.bin_width : 1.0;
  double total = 0.0;
  for (double x : dist.weights) total += std::max(0.0, x) * f;
  double acc = 0.0;
  for (std::size_t j = 0; j < dist.w.size(); ++j) {
    acc += std::max(0.0, dist.weights[j]) * f;
    if (acc >= p * total) return dist.w[j];
  }
  return dist.w.empty() ? 0.0 : dist.w.back();
}

/// Probability carried by W >= w0.
inline double mass_above(const WorkDistribution& dist, double w0) {
  const double f = dist.kind == DistKind::density ? dist.bin_width : 1.0;
  double s = 0.0;
  for (std::size_t j = 0; j < dist.w.size(); ++j) {
    if (dist.w[j] >= w0) s += std::max(0.0, dist.weights[j]) * f;
  }
  return s;
}

}  // namespace chaoswork
