#pragma once

// Subcommand orchestration. Each run writes its result files plus one
// <subcommand>_manifest.json listing them with checksums.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "chaoswork/io/config.hpp"
#include "chaoswork/io/csv.hpp"
#include "chaoswork/io/manifest.hpp"
#include "chaoswork/io/svg.hpp"
#include "chaoswork/quantum.hpp"
#include "chaoswork/semiclassical.hpp"
#include "chaoswork/thermal.hpp"
#include "chaoswork/version.hpp"
#include "chaoswork/work_distribution.hpp"

namespace chaoswork::io {

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> s{"semiclassical", "classical", "quantum", "jarzynski", "compare", "limits"};
  return s;
}

struct RunOptions {
  bool quiet = false;
};

struct RunResult {
  fs::path out_dir;
  fs::path manifest_path;
  json manifest;
};

/// Output directory: config value, then $CHAOSWORK_OUT, then ./chaoswork-out.
inline fs::path resolve_output_dir(const RunConfig& cfg) {
  if (!cfg.output.dir.empty()) return cfg.output.dir;
  if (const char* env = std::getenv("CHAOSWORK_OUT"); env && *env) return env;
  return "chaoswork-out";
}

// Calls f(system, process) with the typed classical system of the config.
template <class F>
void with_classical(const RunConfig& cfg, F&& f) {
  const ScheduleKind sched = parse_schedule(cfg.process.schedule);
  if (cfg.system.kind == "stadium") {
    f(make_stadium(cfg), ProcessSpec<GaussianPotential>{cfg.process.tau, make_gaussians(cfg), sched});
  } else if (cfg.system.kind == "box") {
    f(Box1D(cfg.system.length, cfg.system.mass), ProcessSpec<GaussianBump1D>{cfg.process.tau, make_bump(cfg), sched});
  } else {
    f(Oscillator1D(cfg.system.omega0, cfg.system.mass),
      ProcessSpec<StiffnessPerturbation1D>{cfg.process.tau, make_stiffness(cfg), sched});
  }
}

namespace detail {

inline std::string short_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

inline std::string tag(double kT, std::optional<double> hbar = std::nullopt) {
  std::string t = "kT" + short_num(kT);
  if (hbar) t += "_hbar" + short_num(*hbar);
  return t;
}

inline json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json distribution_meta(const WorkDistribution& d) {
  json j{{"kind", d.kind == DistKind::density ? "density" : "atoms"},
         {"points", d.w.size()},
         {"total", d.total()},
         {"mean", moments(d, 1)},
         {"second_moment", moments(d, 2)}};
  if (d.kind == DistKind::density) {
    j["bin_width"] = d.bin_width;
    j["window"] = d.window;
    j["broadening"] = d.broadening;
    j["min_before_clip"] = d.min_before_clip;
    j["clipped_mass"] = d.clipped_mass;
    j["imag_residue"] = d.imag_residue;
    j["quality_ok"] = d.quality_ok;
  }
  return j;
}

inline json jarzynski_json(const JarzynskiReport& r, double delta_f, double delta_f_err) {
  return json{{"lhs", r.lhs},
              {"rhs", r.rhs},
              {"ratio", r.ratio},
              {"stderr", r.std_error},
              {"delta_f", delta_f},
              {"delta_f_stderr", delta_f_err},
              {"negative_work_probability", r.negative_work_probability},
              {"negative_work_share_of_lhs", r.negative_work_share}};
}

inline const char* kNegativeWorkCaveat =
    "exp(-beta W) amplifies any weight at W < 0; for windowed transforms that weight is mostly kernel "
    "leakage from the W -> 0+ edge, so negative_work_share_of_lhs bounds how much of lhs it supplies";

inline QuantumModel load_matrix_model(const RunConfig& cfg, double hbar) {
  fs::path p = cfg.quantum.matrix_file;
  if (p.is_relative() && !cfg.base_dir.empty()) p = fs::path(cfg.base_dir) / p;
  const std::string text = read_file(p);
  Eigen::VectorXd e0;
  Eigen::MatrixXcd v;
  if (p.extension() == ".json") {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw ConfigError("quantum.matrix_file", std::string("invalid JSON: ") + e.what());
    }
    if (!j.contains("e0") || !j.contains("v")) throw ConfigError("quantum.matrix_file", "needs keys e0 and v");
    const auto e = j["e0"].get<std::vector<double>>();
    const auto vr = j["v"].get<std::vector<std::vector<double>>>();
    std::vector<std::vector<double>> vi;
    if (j.contains("v_imag")) vi = j["v_imag"].get<std::vector<std::vector<double>>>();
    const auto n = static_cast<Eigen::Index>(e.size());
    e0 = Eigen::Map<const Eigen::VectorXd>(e.data(), n);
    v.resize(n, n);
    if (static_cast<Eigen::Index>(vr.size()) != n) throw ConfigError("quantum.matrix_file", "v must be N x N");
    for (Eigen::Index r = 0; r < n; ++r) {
      if (static_cast<Eigen::Index>(vr[r].size()) != n) throw ConfigError("quantum.matrix_file", "v must be N x N");
      for (Eigen::Index c = 0; c < n; ++c) {
        const double im = vi.empty() ? 0.0 : vi.at(r).at(c);
        v(r, c) = {vr[r][c], im};
      }
    }
  } else {
    // CSV: first row E0, then N rows of real V.
    std::vector<std::vector<double>> rows;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::vector<double> r;
      std::stringstream ls(line);
      std::string cell;
      while (std::getline(ls, cell, ',')) {
        try {
          r.push_back(std::stod(cell));
        } catch (const std::logic_error&) {
          throw ConfigError("quantum.matrix_file", "non-numeric cell '" + cell + "'");
        }
      }
      rows.push_back(r);
    }
    if (rows.empty()) throw ConfigError("quantum.matrix_file", "empty matrix file");
    const auto n = static_cast<Eigen::Index>(rows[0].size());
    if (static_cast<Eigen::Index>(rows.size()) != n + 1) throw ConfigError("quantum.matrix_file", "expected E0 row plus N rows of V");
    e0 = Eigen::Map<const Eigen::VectorXd>(rows[0].data(), n);
    v.resize(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      if (static_cast<Eigen::Index>(rows[r + 1].size()) != n) throw ConfigError("quantum.matrix_file", "V must be N x N");
      for (Eigen::Index c = 0; c < n; ++c) v(r, c) = rows[r + 1][c];
    }
  }
  try {
    return explicit_model(e0, v, hbar);
  } catch (const ContractError& e) {
    throw ConfigError("quantum.matrix_file", e.what());
  }
}

/// Quantum counterpart of the config, if one exists.
inline std::optional<QuantumModel> quantum_model(const RunConfig& cfg, double hbar, std::size_t basis) {
  const auto& q = cfg.quantum;
  if (q.model == "none") return std::nullopt;
  if (q.model == "two_level") return two_level(q.gap, q.v00, q.v01, q.v11, hbar);
  if (q.model == "explicit") return load_matrix_model(cfg, hbar);
  if (cfg.system.kind == "box") return box_with_bump(basis, cfg.system.length, cfg.system.mass, make_bump(cfg), hbar);
  if (cfg.system.kind == "oscillator") {
    return oscillator_ramp(basis, cfg.system.omega0, cfg.system.mass, make_stiffness(cfg), hbar);
  }
  return std::nullopt;
}

/// Built-in 1D models share the classical process duration; explicit and
/// two-level models use quantum.tau.
inline QuantumProcess quantum_process(const RunConfig& cfg) {
  QuantumProcess qp;
  const bool from_system = cfg.quantum.model == "auto";
  qp.tau = from_system ? cfg.process.tau : cfg.quantum.tau;
  qp.schedule = parse_schedule(cfg.process.schedule);
  qp.n_steps = cfg.quantum.n_steps;
  return qp;
}

class Runner {
 public:
  Runner(const RunConfig& cfg, const RunOptions& opt)
      : cfg_(cfg), opt_(opt), out_(resolve_output_dir(cfg)), hash_(sha256_hex(canonical_text(cfg))) {}

  RunResult run(const std::string& sub) {
    const auto t0 = std::chrono::steady_clock::now();
    if (sub == "semiclassical") {
      semiclassical();
    } else if (sub == "classical") {
      classical();
    } else if (sub == "quantum") {
      quantum();
    } else if (sub == "jarzynski") {
      jarzynski();
    } else if (sub == "compare") {
      compare(false);
    } else if (sub == "limits") {
      compare(true);
    } else {
      throw ConfigError("subcommand", "unknown subcommand '" + sub + "'");
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto bad = out_.verify();
    if (!bad.empty()) throw FilesystemError("checksum mismatch after write: " + bad.front());
    RunResult res;
    res.out_dir = out_.dir();
    res.manifest = json{{"subcommand", sub},
                        {"version", std::string(kVersion)},
                        {"config_sha256", hash_},
                        {"config", to_json(cfg_)},
                        {"wall_time_s", wall},
                        {"failures", failures_},
                        {"files", out_.file_list()}};
    res.manifest_path = out_.dir() / (sub + "_manifest.json");
    std::ofstream m(res.manifest_path, std::ios::trunc);
    if (!m) throw FilesystemError("cannot write manifest '" + res.manifest_path.string() + "'");
    m << res.manifest.dump(2) << '\n';
    return res;
  }

 private:
  void log(const std::string& s) const {
    if (!opt_.quiet) std::cerr << "chaoswork: " << s << '\n';
  }

  void write_json(const std::string& name, const json& j) { out_.write(name, j.dump(2) + "\n"); }

  void plot(const std::string& name, const std::vector<Series>& series, const std::string& title,
            const std::string& xl, const std::string& yl) {
    if (!cfg_.output.plot) return;
    PlotStyle st;
    st.title = title;
    st.x_label = xl;
    st.y_label = yl;
    st.config_hash = hash_;
    out_.write(name, emit_plot(series, st));
  }

  UGrid grid() const { return UGrid{cfg_.engine.u_max, cfg_.engine.n_points}; }

  ParallelOptions parallel() const { return ParallelOptions{cfg_.engine.threads, cfg_.engine.chunk}; }

  SampleStream stream() const { return SampleStream{cfg_.engine.seed, 0}; }

  SemiclassicalOptions sc_options(bool record) const {
    SemiclassicalOptions o;
    o.dt = cfg_.engine.dt;
    o.s_step_max = cfg_.engine.s_step_max;
    o.failure_budget = cfg_.engine.failure_budget;
    o.record_works = record;
    o.parallel = parallel();
    return o;
  }

  Binning binning() const {
    Binning b;
    if (cfg_.engine.bins == "aligned") {
      b.width = std::numbers::pi / cfg_.engine.u_max;
      b.origin = 0.0;
    } else if (cfg_.engine.bins != "fd") {
      b.count = static_cast<std::size_t>(std::stoul(cfg_.engine.bins));
    }
    return b;
  }

  WorkDistribution matched_classical(const std::vector<double>& works, const WorkDistribution& like) const {
    return resolution_matched_histogram(works, like, grid(), transform_options(cfg_));
  }

  WorkDistribution raw_histogram(const std::vector<double>& works, const WorkDistribution& like) const {
    Binning b;
    b.width = like.bin_width;
    b.origin = like.w.front();
    return histogram_density(works, b);
  }

  struct ScOutcome {
    CharFunc half;
    WorkDistribution pw;
    std::vector<double> works;
    std::size_t stride = 1;
  };

  template <class S, class P>
  ScOutcome run_semiclassical(const S& sys, const ProcessSpec<P>& proc, double kT, double hbar, bool record) {
    log("semiclassical " + tag(kT, hbar) + ": " + std::to_string(cfg_.engine.samples) + " samples, " +
        std::to_string(cfg_.engine.n_points) + " u-nodes");
    auto r = char_func_semiclassical(sys, proc, ThermalParams{1.0 / kT, hbar}, grid(), cfg_.engine.samples, stream(),
                                     sc_options(record));
    failures_[tag(kT, hbar)] = r.cf.n_failed;
    ScOutcome o;
    o.pw = char_to_work(hermitian_extend(r.cf), transform_options(cfg_));
    o.half = std::move(r.cf);
    o.works = std::move(r.works);
    o.stride = r.stride;
    return o;
  }

  std::vector<WorkDistribution> bootstrap_pw(const CharFunc& half) const {
    std::vector<WorkDistribution> reps;
    if (cfg_.engine.bootstrap < 2 || half.batch_sums.size() < 2) return reps;
    reps.reserve(cfg_.engine.bootstrap);
    for (std::size_t b = 0; b < cfg_.engine.bootstrap; ++b) {
      reps.push_back(char_to_work(hermitian_extend(bootstrap_replicate(half, stream(), b)), transform_options(cfg_)));
    }
    return reps;
  }

  // -------------------------------------------------------------------------

  void semiclassical() {
    with_classical(cfg_, [&](const auto& sys, const auto& proc) {
      for (double kT : cfg_.thermal.kT) {
        for (double hbar : cfg_.thermal.hbar) {
          const std::string t = tag(kT, hbar);
          ScOutcome o = run_semiclassical(sys, proc, kT, hbar, false);
          out_.write("semiclassical_" + t + "_g.csv", char_func_csv(o.half));
          out_.write("semiclassical_" + t + "_pw.csv", work_distribution_csv(o.pw));
          write_json("semiclassical_" + t + ".json",
                     json{{"kT", kT},
                          {"hbar", hbar},
                          {"samples", o.half.n_samples},
                          {"failed", o.half.n_failed},
                          {"u_max", cfg_.engine.u_max},
                          {"n_points", cfg_.engine.n_points},
                          {"integrand_stride", o.stride},
                          {"seed", cfg_.engine.seed},
                          {"distribution", distribution_meta(o.pw)}});
          std::vector<double> absg(o.half.size());
          for (std::size_t k = 0; k < absg.size(); ++k) absg[k] = std::abs(o.half.g[k]);
          plot("semiclassical_" + t + "_pw.svg", {{"P_SC(W) " + t, o.pw.w, o.pw.weights}}, "Semiclassical P(W)", "W",
               "P(W)");
          plot("semiclassical_" + t + "_g.svg", {{"|G_SC(u)| " + t, o.half.u, absg}}, "Characteristic function", "u",
               "|G(u)|");
        }
      }
    });
  }

  void classical() {
    with_classical(cfg_, [&](const auto& sys, const auto& proc) {
      for (double kT : cfg_.thermal.kT) {
        const std::string t = tag(kT);
        log("classical " + t + ": " + std::to_string(cfg_.engine.samples) + " samples");
        ClassicalWorkOptions co{cfg_.engine.dt, cfg_.engine.failure_budget, parallel()};
        const auto samples =
            classical_two_point_samples(sys, proc, ThermalParams{1.0 / kT, 1.0}, cfg_.engine.samples, stream(), co);
        const auto works = works_of(samples);
        std::size_t failed = 0;
        for (double w : works) failed += std::isnan(w) ? 1 : 0;
        failures_[t] = failed;
        const WorkDistribution h = histogram_density(works, binning());
        const auto df = classical_free_energy_difference(sys, proc, 1.0 / kT, cfg_.engine.free_energy_samples,
                                                         stream(), parallel());
        out_.write("classical_" + t + "_pw.csv", work_distribution_csv(h));
        write_json("classical_" + t + ".json", json{{"kT", kT},
                                                   {"samples", works.size() - failed},
                                                   {"failed", failed},
                                                   {"bins", h.w.size()},
                                                   {"distribution", distribution_meta(h)},
                                                   {"delta_f", df.value},
                                                   {"delta_f_stderr", df.std_error}});
        plot("classical_" + t + "_pw.svg", {{"P_C(W) " + t, h.w, h.weights}}, "Classical P(W)", "W", "P(W)");
      }
    });
  }

  struct QuantumOutcome {
    QuantumModel model;
    TransitionResult tr;
    WorkDistribution atoms;
    double delta_f = 0.0;
  };

  // Transitions do not depend on temperature, so they are computed once per
  // (hbar, basis) and reused across the kT list.
  QuantumOutcome run_quantum(double kT, double hbar, std::size_t basis) {
    const auto key = std::make_pair(hbar, basis);
    auto it = transitions_.find(key);
    if (it == transitions_.end()) {
      auto model = quantum_model(cfg_, hbar, basis);
      if (!model) throw ConfigError("quantum.model", "no quantum counterpart for system '" + cfg_.system.kind + "'");
      TransitionResult tr = transition_probabilities(*model, quantum_process(cfg_));
      it = transitions_.emplace(key, std::make_pair(std::move(*model), std::move(tr))).first;
    }
    QuantumOutcome q;
    q.model = it->second.first;
    q.tr = it->second.second;
    q.atoms = quantum_work_distribution(q.model.e0, q.tr, 1.0 / kT);
    q.delta_f = quantum_free_energy_difference(q.model.e0, q.tr.basis.e_tau, 1.0 / kT);
    return q;
  }

  void quantum() {
    for (double kT : cfg_.thermal.kT) {
      for (double hbar : cfg_.thermal.hbar) {
        const std::string t = tag(kT, hbar);
        log("quantum " + t);
        QuantumOutcome q = run_quantum(kT, hbar, cfg_.quantum.basis_size);
        const auto n = q.tr.p.rows();
        double row_err = 0.0, col_err = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          row_err = std::max(row_err, std::abs(q.tr.p.row(i).sum() - 1.0));
          col_err = std::max(col_err, std::abs(q.tr.p.col(i).sum() - 1.0));
        }
        const auto jr = jarzynski_check(q.atoms, 1.0 / kT, q.delta_f);
        json report{{"kT", kT},
                    {"hbar", hbar},
                    {"model", q.model.name},
                    {"dim", q.model.dim()},
                    {"tau", quantum_process(cfg_).tau},
                    {"rk4_steps", q.tr.n_steps},
                    {"max_norm_drift", q.tr.max_norm_drift},
                    {"max_row_sum_error", row_err},
                    {"max_col_sum_error", col_err},
                    {"delta_f", q.delta_f},
                    {"jarzynski", jarzynski_json(jr, q.delta_f, 0.0)},
                    {"distribution", distribution_meta(q.atoms)}};
        if (cfg_.quantum.check_truncation && cfg_.quantum.model == "auto") {
          QuantumOutcome q2 = run_quantum(kT, hbar, 2 * cfg_.quantum.basis_size);
          report["truncation_check"] = json{{"basis_size_doubled", q2.model.dim()},
                                            {"mean_change", moments(q2.atoms, 1) - moments(q.atoms, 1)},
                                            {"second_moment_change", moments(q2.atoms, 2) - moments(q.atoms, 2)},
                                            {"delta_f_change", q2.delta_f - q.delta_f}};
        }
        out_.write("quantum_" + t + "_atoms.csv", work_distribution_csv(q.atoms));
        out_.write("quantum_" + t + "_g.csv", char_func_csv(char_func_quantum(q.atoms, grid())));
        out_.write("quantum_" + t + "_transitions.csv", matrix_csv(q.tr.p));
        write_json("quantum_" + t + ".json", report);
        plot("quantum_" + t + "_atoms.svg", {{"P_Q(W) " + t, q.atoms.w, q.atoms.weights}}, "Quantum P(W) atoms", "W",
             "probability");
      }
    }
  }

  void jarzynski() {
    const bool has_quantum = cfg_.quantum.model != "none" && (cfg_.quantum.model != "auto" || cfg_.system.kind != "stadium");
    const bool quantum_only = cfg_.quantum.model == "two_level" || cfg_.quantum.model == "explicit";
    for (double kT : cfg_.thermal.kT) {
      for (double hbar : cfg_.thermal.hbar) {
        const std::string t = tag(kT, hbar);
        json report{{"kT", kT}, {"hbar", hbar}, {"seed", cfg_.engine.seed}, {"caveat", kNegativeWorkCaveat}};
        if (!quantum_only) {
          with_classical(cfg_, [&](const auto& sys, const auto& proc) {
            const double beta = 1.0 / kT;
            ScOutcome o = run_semiclassical(sys, proc, kT, hbar, true);
            const auto df = classical_free_energy_difference(sys, proc, beta, cfg_.engine.free_energy_samples, stream(),
                                                             parallel());
            const auto js = jarzynski_check(o.pw, beta, df.value, bootstrap_pw(o.half));
            const auto jc = jarzynski_from_samples(o.works, beta, df.value);
            report["semiclassical"] = jarzynski_json(js, df.value, df.std_error);
            report["semiclassical"]["samples"] = o.half.n_samples;
            report["classical"] = jarzynski_json(jc, df.value, df.std_error);
          });
        }
        if (has_quantum) {
          QuantumOutcome q = run_quantum(kT, hbar, cfg_.quantum.basis_size);
          report["quantum"] = jarzynski_json(jarzynski_check(q.atoms, 1.0 / kT, q.delta_f), q.delta_f, 0.0);
        }
        write_json("jarzynski_" + t + ".json", report);
      }
    }
  }

  void compare(bool limits_only) {
    const std::string sub = limits_only ? "limits" : "compare";
    with_classical(cfg_, [&](const auto& sys, const auto& proc) {
      for (double kT : cfg_.thermal.kT) {
        std::vector<double> works;
        std::vector<std::vector<double>> rows;
        json per_hbar = json::array();
        std::vector<Series> overlay;
        WorkDistribution matched;
        bool have_matched = false;
        for (double hbar : cfg_.thermal.hbar) {
          ScOutcome o = run_semiclassical(sys, proc, kT, hbar, works.empty());
          if (works.empty()) works = std::move(o.works);
          if (!have_matched) {
            matched = matched_classical(works, o.pw);
            have_matched = true;
          }
          const WorkDistribution raw = raw_histogram(works, o.pw);
          const double l1m = l1_distance(o.pw, matched);
          const double l1r = l1_distance(o.pw, raw);
          rows.push_back({hbar, l1m, l1r, moments(o.pw, 1), moments(o.pw, 2)});
          per_hbar.push_back(json{{"hbar", hbar},
                                  {"l1_matched", l1m},
                                  {"l1_raw_histogram", l1r},
                                  {"semiclassical", distribution_meta(o.pw)}});
          overlay.push_back({"P_SC hbar=" + short_num(hbar), o.pw.w, o.pw.weights});
          if (!limits_only) {
            out_.write(sub + "_" + tag(kT, hbar) + "_pw.csv", work_distribution_csv(o.pw));
          }
        }
        overlay.push_back({"P_C (matched)", matched.w, matched.weights});
        const std::string t = tag(kT);
        json report{{"kT", kT},
                    {"samples", cfg_.engine.samples},
                    {"seed", cfg_.engine.seed},
                    {"classical_matched", distribution_meta(matched)},
                    {"per_hbar", per_hbar}};
        if (limits_only) {
          // Sorted by decreasing hbar, L1 should decrease.
          std::vector<std::pair<double, double>> by_h;
          for (const auto& r : rows) by_h.emplace_back(r[0], r[1]);
          std::sort(by_h.begin(), by_h.end(), [](auto a, auto b) { return a.first > b.first; });
          bool monotone = true;
          for (std::size_t i = 1; i < by_h.size(); ++i) monotone = monotone && by_h[i].second < by_h[i - 1].second;
          report["monotone_decreasing"] = monotone;
          report["l1_at_smallest_hbar"] = by_h.back().second;
        } else {
          out_.write(sub + "_" + t + "_classical_matched_pw.csv", work_distribution_csv(matched));
          if (auto qm = quantum_model(cfg_, cfg_.thermal.hbar.front(), cfg_.quantum.basis_size)) {
            QuantumOutcome q = run_quantum(kT, cfg_.thermal.hbar.front(), cfg_.quantum.basis_size);
            report["quantum"] = distribution_meta(q.atoms);
          }
        }
        out_.write(sub + "_" + t + ".csv",
                   table_csv({"hbar", "l1_matched", "l1_raw_histogram", "mean_sc", "second_moment_sc"}, rows));
        write_json(sub + "_" + t + ".json", report);
        plot(sub + "_" + t + "_pw.svg", overlay, "Semiclassical vs classical P(W), " + t, "W", "P(W)");
      }
    });
  }

  RunConfig cfg_;
  RunOptions opt_;
  OutputSet out_;
  std::string hash_;
  json failures_ = json::object();
  std::map<std::pair<double, std::size_t>, std::pair<QuantumModel, TransitionResult>> transitions_;
};

}  // namespace detail

inline RunResult run(const std::string& subcommand, const RunConfig& cfg, const RunOptions& opt = {}) {
  validate(cfg);
  detail::Runner r(cfg, opt);
  return r.run(subcommand);
}

}  // namespace chaoswork::io
