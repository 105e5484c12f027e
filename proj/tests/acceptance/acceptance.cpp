// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
//
// CHAOSWORK_ACCEPTANCE_SCALE (default 1) multiplies the Monte Carlo sample
// counts; values below 1 give a quick smoke run whose verdicts are not final.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <Eigen/Dense>

#include "chaoswork/chaoswork.hpp"
#include "chaoswork/io/config.hpp"
#include "chaoswork/io/runner.hpp"

namespace fs = std::filesystem;
using namespace chaoswork;

namespace {

double g_scale = 1.0;
const fs::path kConfigs = CHAOSWORK_CONFIGS;

std::size_t scaled(std::size_t full, std::size_t floor_n = 200) {
  return std::max(floor_n, static_cast<std::size_t>(std::llround(static_cast<double>(full) * g_scale)));
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

io::RunConfig config(const std::string& name, const std::vector<std::string>& overrides = {}) {
  io::RunConfig c = io::load_config((kConfigs / name).string(), overrides);
  io::validate(c);
  return c;
}

UGrid grid_of(const io::RunConfig& c) { return UGrid{c.engine.u_max, c.engine.n_points}; }

SemiclassicalOptions sc_options(const io::RunConfig& c, bool record) {
  SemiclassicalOptions o;
  o.dt = c.engine.dt;
  o.s_step_max = c.engine.s_step_max;
  o.failure_budget = c.engine.failure_budget;
  o.record_works = record;
  return o;
}

// One stadium semiclassical run and what the later checks need from it.
struct StadiumRun {
  double kT = 0.0;
  double hbar = 1.0;
  CharFunc half;
  WorkDistribution pw;
  std::vector<double> works;
};

StadiumRun run_stadium(const io::RunConfig& c, double kT, double hbar, std::size_t samples, bool record) {
  StadiumRun r;
  r.kT = kT;
  r.hbar = hbar;
  io::with_classical(c, [&](const auto& sys, const auto& proc) {
    auto res = char_func_semiclassical(sys, proc, ThermalParams{1.0 / kT, hbar}, grid_of(c), samples,
                                       SampleStream{c.engine.seed, 0}, sc_options(c, record));
    r.pw = char_to_work(hermitian_extend(res.cf), io::transform_options(c));
    r.half = std::move(res.cf);
    r.works = std::move(res.works);
  });
  return r;
}

// Shared between the limit, Jarzynski and shape checks.
std::optional<StadiumRun> g_kT256_hbar1;
std::optional<StadiumRun> g_kT1024;

// ---------------------------------------------------------------------------

Verdict weyl_spacing() {
  const io::RunConfig c = config("stadium_kT256.json");
  const StadiumGeometry geom{c.system.r, c.system.l};
  const double area = c.system.l * c.system.r + 0.25 * std::numbers::pi * c.system.r * c.system.r;
  const double de = mean_level_spacing(geom, c.system.mass, 1.0);
  const double oracle = 4.0 * std::numbers::pi / area;
  const double rel = std::abs(de / 7.0 - 1.0);
  const bool ok = std::abs(de - oracle) < 1e-12 * oracle && rel < 0.01;
  return {ok, fmt("dE=%.6f, 4pi/Area=%.6f, |dE/7-1|=%.4f (< 0.01)", de, oracle, rel)};
}

Verdict quantum_jarzynski() {
  std::vector<QuantumModel> models;
  models.push_back(box_with_bump(16, 1.0, 0.5, GaussianBump1D(20.0, 0.4, 0.1), 1.0));
  models.push_back(oscillator_ramp(64, 1.0, 1.0, StiffnessPerturbation1D::ramp(1.0, 1.0, std::sqrt(1.2)), 1.0));
  models.push_back(two_level(1.0, 0.2, {0.4, 0.1}, 0.3));
  {
    const io::RunConfig c = config("explicit_matrix.json");
    models.push_back(io::detail::quantum_model(c, 1.0, 0).value());
  }
  const double taus[] = {0.0, 0.3, 2.0};
  const double betas[] = {0.01, 0.3, 3.0};
  double worst = 0.0;
  int cases = 0;
  for (const auto& m : models) {
    for (double tau : taus) {
      const QuantumProcess qp{tau, ScheduleKind::linear, 0};
      const TransitionResult tr = transition_probabilities(m, qp);
      for (double beta : betas) {
        const auto atoms = quantum_work_distribution(m.e0, tr, beta);
        const double df = quantum_free_energy_difference(m.e0, tr.basis.e_tau, beta);
        worst = std::max(worst, std::abs(jarzynski_check(atoms, beta, df).ratio - 1.0));
        ++cases;
      }
    }
  }
  return {worst < 1e-10, fmt("%d cases over box(N=16), oscillator(N=64), two-level, 3-level file; max |ratio-1|=%.2e", cases, worst)};
}

Verdict unitarity() {
  const Eigen::Index n = 32;
  Eigen::VectorXd e0(n);
  for (Eigen::Index k = 0; k < n; ++k) e0[k] = static_cast<double>(k) + 0.02 * static_cast<double>(k * k);
  const SampleStream stream{2024, 0};
  double worst = 0.0, drift = 0.0;
  for (std::size_t r = 0; r < 20; ++r) {
    const QuantumModel m = random_hermitian_model(e0, 0.5, stream, r);
    const TransitionResult tr = transition_probabilities(m, QuantumProcess{1.5, ScheduleKind::linear, 0});
    for (Eigen::Index i = 0; i < n; ++i) {
      worst = std::max({worst, std::abs(tr.p.row(i).sum() - 1.0), std::abs(tr.p.col(i).sum() - 1.0)});
    }
    drift = std::max(drift, tr.max_norm_drift);
  }
  return {worst < 1e-8, fmt("20 random Hermitian V at N=32: max |row/col sum - 1|=%.2e, max norm drift %.2e", worst, drift)};
}

Verdict quench_consistency() {
  const double tau = 1e-4;
  const io::RunConfig c =
      config("stadium_kT256.json", {"process.tau=" + fmt("%.17g", tau), "engine.dt=" + fmt("%.17g", tau / 200.0)});
  const std::size_t samples = scaled(100000);
  const double kT = c.thermal.kT.front();
  const double hbar = c.thermal.hbar.front();
  double worst = 0.0, worst_diff = 0.0;
  io::with_classical(c, [&](const auto& sys, const auto& proc) {
    const ThermalParams th{1.0 / kT, hbar};
    SemiclassicalOptions o = sc_options(c, false);
    const auto fin = char_func_semiclassical(sys, proc, th, grid_of(c), samples, SampleStream{c.engine.seed, 0}, o);
    o.action = ActionKind::quench;
    const auto qu = char_func_semiclassical(sys, proc, th, grid_of(c), samples, SampleStream{c.engine.seed, 0}, o);
    for (std::size_t k = 0; k < fin.cf.size(); ++k) {
      const double d = std::abs(fin.cf.g[k] - qu.cf.g[k]);
      const double se = std::hypot(fin.cf.std_error[k], qu.cf.std_error[k]);
      worst_diff = std::max(worst_diff, d);
      if (se > 0.0) worst = std::max(worst, d / se);
      else if (d > 0.0) worst = std::numeric_limits<double>::infinity();
    }
  });
  return {worst <= 3.0, fmt("tau=1e-4, kT=%g, %zu shared samples: max |dG|=%.2e, max |dG|/SE=%.3f (<= 3)", kT,
                            samples, worst_diff, worst)};
}

Verdict classical_limit() {
  const io::RunConfig c = config("stadium_limits.json");
  const std::size_t samples = scaled(1000000);
  const double kT = c.thermal.kT.front();
  std::vector<double> hbars = c.thermal.hbar;
  std::sort(hbars.begin(), hbars.end(), std::greater<>());
  std::vector<double> works;
  std::optional<WorkDistribution> matched;
  std::vector<double> l1;
  std::string row;
  for (double hbar : hbars) {
    StadiumRun r = run_stadium(c, kT, hbar, samples, works.empty());
    if (works.empty()) works = r.works;
    if (!matched) matched = resolution_matched_histogram(works, r.pw, grid_of(c), io::transform_options(c));
    l1.push_back(l1_distance(r.pw, *matched));
    row += fmt(" hbar=%g:%.4f", hbar, l1.back());
    if (hbar == 1.0) g_kT256_hbar1 = std::move(r);
  }
  bool monotone = true;
  for (std::size_t i = 1; i < l1.size(); ++i) monotone = monotone && l1[i] < l1[i - 1];
  const bool ok = monotone && hbars.back() == 0.05 && l1.back() < 0.05;
  return {ok, fmt("kT=%g, %zu samples, L1 vs resolution-matched histogram:", kT, samples) + row +
                  (monotone ? " (monotone)" : " (NOT monotone)")};
}

Verdict semiclassical_jarzynski() {
  std::string detail;
  bool ok = true;
  const std::size_t samples = scaled(1000000);
  for (const char* name : {"stadium_kT256.json", "stadium_kT1024.json"}) {
    const io::RunConfig c = config(name);
    const double kT = c.thermal.kT.front();
    const double hbar = c.thermal.hbar.front();
    const double beta = 1.0 / kT;
    StadiumRun r;
    if (kT == 256.0 && g_kT256_hbar1 && g_kT256_hbar1->half.n_samples + g_kT256_hbar1->half.n_failed == samples) {
      r = *g_kT256_hbar1;
    } else {
      r = run_stadium(c, kT, hbar, samples, true);
      if (kT == 256.0) g_kT256_hbar1 = r;
    }
    if (kT == 1024.0) g_kT1024 = r;
    FreeEnergyEstimate df;
    io::with_classical(c, [&](const auto& sys, const auto& proc) {
      df = classical_free_energy_difference(sys, proc, beta, scaled(c.engine.free_energy_samples, 10000),
                                            SampleStream{c.engine.seed, 0});
    });
    std::vector<WorkDistribution> reps;
    for (std::size_t b = 0; b < c.engine.bootstrap; ++b) {
      reps.push_back(char_to_work(hermitian_extend(bootstrap_replicate(r.half, SampleStream{c.engine.seed, 0}, b)),
                                  io::transform_options(c)));
    }
    const JarzynskiReport j = jarzynski_check(r.pw, beta, df.value, reps);
    const bool in = j.ratio >= 0.9 && j.ratio <= 1.1;
    ok = ok && in;
    detail += fmt(" kT=%g: ratio=%.4f+-%.4f dF=%.3f+-%.3f, W<0 carries %.1f%% of <e^-bW>;", kT, j.ratio,
                  j.std_error, df.value, df.std_error, 100.0 * j.negative_work_share);
  }
  return {ok, fmt("seed 1, %zu samples, range [0.9, 1.1]:", samples) + detail};
}

// Shape properties of one windowed P^SC.
bool shape_ok(const WorkDistribution& pw, std::string& detail, double& q99) {
  const double peak = *std::max_element(pw.weights.begin(), pw.weights.end());
  const double min_rel = pw.min_before_clip / peak;
  const double norm = pw.total();
  const double leak_floor = -2.0 * pw.broadening;
  const double dominant = mass_above(pw, leak_floor);
  q99 = quantile(pw, 0.99);
  const bool ok = min_rel >= -1e-3 && std::abs(norm - 1.0) <= 1e-3 && pw.clipped_mass <= 1e-3 && dominant >= 0.99;
  detail += fmt(" min/peak=%.1e clipped=%.1e mass(W>=0)=%.3f mass(W>=-2s_k)=%.4f q99=%.0f;", min_rel,
                pw.clipped_mass, mass_above(pw, 0.0), dominant, q99);
  return ok;
}

Verdict shape_and_1d_moments() {
  std::string detail;
  bool ok = true;
  std::vector<double> q99s;
  for (const char* name : {"stadium_kT32.json", "stadium_kT256.json", "stadium_kT1024.json"}) {
    const io::RunConfig c = config(name);
    const double kT = c.thermal.kT.front();
    StadiumRun r;
    if (kT == 256.0 && g_kT256_hbar1) r = *g_kT256_hbar1;
    else if (kT == 1024.0 && g_kT1024) r = *g_kT1024;
    else r = run_stadium(c, kT, c.thermal.hbar.front(), scaled(c.engine.samples), false);
    double q99 = 0.0;
    detail += fmt(" kT=%g:", kT);
    ok = shape_ok(r.pw, detail, q99) && ok;
    q99s.push_back(q99);
  }
  const bool grows = q99s[0] < q99s[1] && q99s[1] < q99s[2];
  ok = ok && grows;
  detail += grows ? " tail grows with T;" : " tail does NOT grow with T;";

  // 1D box: quantum vs semiclassical at high temperature, compared through one
  // windowed transform so both carry the same kernel.
  const io::RunConfig c = config("box_bump.json");
  const double kT = c.thermal.kT.back();
  const double hbar = c.thermal.hbar.front();
  const double beta = 1.0 / kT;
  WorkDistribution psc;
  io::with_classical(c, [&](const auto& sys, const auto& proc) {
    auto res = char_func_semiclassical(sys, proc, ThermalParams{beta, hbar}, grid_of(c), scaled(c.engine.samples),
                                       SampleStream{c.engine.seed, 0}, sc_options(c, false));
    psc = char_to_work(hermitian_extend(res.cf), io::transform_options(c));
  });
  const QuantumModel qm = io::detail::quantum_model(c, hbar, c.quantum.basis_size).value();
  const auto atoms = quantum_work_distribution(qm, io::detail::quantum_process(c), beta);
  const WorkDistribution pq = char_to_work(hermitian_extend(work_to_char(atoms, grid_of(c))), io::transform_options(c));
  const double m1 = std::abs(moments(psc, 1) / moments(pq, 1) - 1.0);
  const double m2 = std::abs(moments(psc, 2) / moments(pq, 2) - 1.0);
  const bool close = m1 <= 0.10 && m2 <= 0.10;
  ok = ok && close;
  detail += fmt(" box kT=%g hbar=%g N=%zu (beta<W>=%.3f): <W> %.3f vs %.3f (%.1f%%), <W^2> %.2f vs %.2f (%.1f%%)", kT,
                hbar, qm.dim(), beta * moments(atoms, 1), moments(psc, 1), moments(pq, 1), 100.0 * m1,
                moments(psc, 2), moments(pq, 2), 100.0 * m2);
  return {ok, detail};
}

// Explicit model whose two spectra are integers, so every work value sits on
// the unit-spaced W-grid of u_max = pi and an unwindowed inverse is exact.
Verdict transform_round_trip() {
  const Eigen::Index n = 5;
  Eigen::VectorXd e0(n), ef(n);
  e0 << 0, 1, 3, 4, 7;
  ef << -2, 2, 3, 6, 9;
  const SampleStream stream{77, 0};
  auto gen = stream.engine(0);
  std::normal_distribution<double> nd;
  Eigen::MatrixXcd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = {nd(gen), nd(gen)};
  const Eigen::MatrixXcd u = Eigen::HouseholderQR<Eigen::MatrixXcd>(a).householderQ();
  Eigen::MatrixXcd v = u * ef.cast<std::complex<double>>().asDiagonal() * u.adjoint();
  v -= e0.cast<std::complex<double>>().asDiagonal();
  v = (0.5 * (v + v.adjoint())).eval();
  const QuantumModel m = explicit_model(e0, v, 1.0);
  const auto atoms = quantum_work_distribution(m, QuantumProcess{1.5, ScheduleKind::linear, 0}, 0.4);

  const UGrid grid{std::numbers::pi, 65};
  TransformOptions opt;
  opt.window.kind = WindowKind::none;
  opt.clip = false;
  opt.w_min = -20.0;
  const WorkDistribution d = char_to_work(hermitian_extend(char_func_quantum(atoms, grid)), opt);
  double loc = 0.0, wt = 0.0, stray = 0.0;
  std::vector<bool> used(d.w.size(), false);
  for (std::size_t i = 0; i < atoms.w.size(); ++i) {
    const auto j = static_cast<std::size_t>(std::lround((atoms.w[i] - d.w.front()) / d.bin_width));
    used[j] = true;
    loc = std::max(loc, std::abs(d.w[j] - atoms.w[i]) / d.bin_width);
    wt = std::max(wt, std::abs(d.weights[j] * d.bin_width - atoms.weights[i]));
  }
  for (std::size_t j = 0; j < d.w.size(); ++j)
    if (!used[j]) stray = std::max(stray, std::abs(d.weights[j] * d.bin_width));
  const bool ok = loc <= 1.0 && wt <= 1e-6 && stray <= 1e-6;
  return {ok, fmt("%zu atoms: max location error %.2e bins, max weight error %.2e, max stray mass %.2e",
                  atoms.w.size(), loc, wt, stray)};
}

Verdict determinism() {
  struct Case {
    std::string sub, file;
    std::vector<std::string> overrides;
  };
  const std::vector<std::string> small{"engine.samples=1500", "engine.free_energy_samples=20000",
                                       "engine.bootstrap=20"};
  auto with = [&](std::vector<std::string> extra) {
    extra.insert(extra.begin(), small.begin(), small.end());
    return extra;
  };
  const std::vector<Case> cases{
      {"semiclassical", "stadium_kT256.json", with({})},
      {"classical", "stadium_kT256.json", with({"engine.samples=20000"})},
      {"jarzynski", "stadium_kT256.json", with({})},
      {"limits", "stadium_limits.json", with({"engine.samples=800"})},
      {"quantum", "oscillator.json", with({})},
      {"compare", "oscillator.json", with({"engine.samples=400", "engine.n_points=128"})},
  };
  const fs::path root = fs::temp_directory_path() / fmt("chaoswork-acceptance-%d", static_cast<int>(::getpid()));
  std::string detail;
  bool ok = true;
  std::size_t files = 0;
  for (const auto& c : cases) {
    std::vector<nlohmann::ordered_json> lists;
    std::vector<std::string> hashes;
    for (int threads : {1, 4}) {
      auto ov = c.overrides;
      ov.push_back("engine.threads=" + std::to_string(threads));
      ov.push_back("output.dir=" + (root / (c.sub + std::to_string(threads))).string());
      ov.push_back("output.plot=true");
      const io::RunConfig cfg = config(c.file, ov);
      const io::RunResult res = io::run(c.sub, cfg, io::RunOptions{true});
      lists.push_back(res.manifest["files"]);
      hashes.push_back(res.manifest["config_sha256"]);
    }
    bool same = lists[0] == lists[1] && hashes[0] == hashes[1] && !lists[0].empty();
    // Byte comparison on disk as well as through the recorded checksums.
    for (const auto& f : lists[0]) {
      const std::string name = f["name"];
      auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), {});
      };
      same = same && slurp(root / (c.sub + "1") / name) == slurp(root / (c.sub + "4") / name);
      ++files;
    }
    ok = ok && same;
    detail += " " + c.sub + (same ? ":same" : ":DIFFERENT");
  }
  fs::remove_all(root);
  return {ok, fmt("threads 1 vs 4, %zu files compared;", files) + detail};
}

}  // namespace

int main() {
  if (const char* s = std::getenv("CHAOSWORK_ACCEPTANCE_SCALE"); s && *s) g_scale = std::stod(s);
  std::cout << "chaoswork " << kVersion << " acceptance, sample scale " << g_scale << std::endl;
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"1 weyl-level-spacing", weyl_spacing},
      {"2 quantum-jarzynski-exact", quantum_jarzynski},
      {"3 unitarity", unitarity},
      {"4 quench-consistency", quench_consistency},
      {"5 classical-limit-convergence", classical_limit},
      {"6 semiclassical-jarzynski", semiclassical_jarzynski},
      {"7 work-distribution-shape", shape_and_1d_moments},
      {"8 transform-round-trip", transform_round_trip},
      {"9 determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!v.pass) ++failed;
    std::cout << (v.pass ? "PASS " : "FAIL ") << name << " [" << fmt("%.0f s", secs) << "] " << v.detail
              << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : fmt("%d criteria failed", failed)) << std::endl;
  return failed == 0 ? 0 : 1;
}
