#pragma once

// Run configuration: a nested JSON document. Every field has a default, so a
// config file only needs the parts it changes. Unknown keys are rejected so a
// typo cannot silently fall back to a default.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "chaoswork/errors.hpp"
#include "chaoswork/potentials.hpp"
#include "chaoswork/process.hpp"
#include "chaoswork/systems.hpp"
#include "chaoswork/work_distribution.hpp"

namespace chaoswork::io {

using json = nlohmann::ordered_json;

struct SystemConfig {
  std::string kind = "stadium";  ///< stadium | box | oscillator
  double r = 1.0;
  double l = 1.0;
  double mass = 0.5;
  double length = 1.0;  ///< box
  double omega0 = 1.0;  ///< oscillator
};

struct PotentialConfig {
  std::string kind = "gaussians";  ///< gaussians | bump | stiffness
  std::vector<Vec<2>> centers{{0.2, 0.4}, {0.67, 0.5}, {0.5, 0.15}, {0.3, 0.75}};
  double sigma = 0.1;
  double lambda = 180.0;
  double height = 1.0;  ///< bump
  double center = 0.5;  ///< bump
  double width = 0.1;   ///< bump
  double omega1 = 1.0;  ///< stiffness: final frequency
};

struct ProcessConfig {
  double tau = 0.1;
  std::string schedule = "linear";
  PotentialConfig potential;
};

struct ThermalConfig {
  std::vector<double> kT{256.0};  ///< temperatures 1 / beta
  std::vector<double> hbar{1.0};
};

struct EngineConfig {
  std::uint64_t seed = 1;
  std::size_t samples = 100000;
  std::size_t free_energy_samples = 1000000;
  double u_max = 0.5;
  std::size_t n_points = 2048;
  double dt = 0.0;
  double s_step_max = 0.0;
  std::string window = "gaussian";
  double broadening_bins = 2.0;
  std::optional<double> w_min;
  std::string bins = "fd";  ///< fd | aligned | <count>
  double failure_budget = 1e-3;
  std::size_t bootstrap = 200;
  std::size_t threads = 0;
  std::size_t chunk = 0;
};

struct QuantumConfig {
  std::string model = "auto";  ///< auto | two_level | explicit | none
  std::size_t basis_size = 64;
  double tau = 1.0;
  std::size_t n_steps = 0;
  double gap = 1.0;  ///< two_level
  double v00 = 0.0;
  double v01 = 0.5;
  double v11 = 0.0;
  std::string matrix_file;  ///< explicit: JSON {"e0": [...], "v": [[...]...]} or CSV
  bool check_truncation = false;
};

struct OutputConfig {
  std::string dir;  ///< empty: $CHAOSWORK_OUT, then ./chaoswork-out
  bool plot = false;
};

struct RunConfig {
  SystemConfig system;
  ProcessConfig process;
  ThermalConfig thermal;
  EngineConfig engine;
  QuantumConfig quantum;
  OutputConfig output;
  /// Directory of the config file, for resolving relative matrix files.
  std::string base_dir;
};

// ---------------------------------------------------------------------------
// JSON mapping
// ---------------------------------------------------------------------------

namespace detail {

inline void reject_unknown(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(where, "must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) throw ConfigError(where + "." + it.key(), "unknown key");
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key, std::string("wrong type: ") + e.what());
  }
}

}  // namespace detail

inline json to_json(const RunConfig& c) {
  json centers = json::array();
  for (const auto& p : c.process.potential.centers) centers.push_back({p[0], p[1]});
  json engine = {
      {"seed", c.engine.seed},
      {"samples", c.engine.samples},
      {"free_energy_samples", c.engine.free_energy_samples},
      {"u_max", c.engine.u_max},
      {"n_points", c.engine.n_points},
      {"dt", c.engine.dt},
      {"s_step_max", c.engine.s_step_max},
      {"window", c.engine.window},
      {"broadening_bins", c.engine.broadening_bins},
      {"w_min", c.engine.w_min ? json(*c.engine.w_min) : json(nullptr)},
      {"bins", c.engine.bins},
      {"failure_budget", c.engine.failure_budget},
      {"bootstrap", c.engine.bootstrap},
      {"threads", c.engine.threads},
      {"chunk", c.engine.chunk},
  };
  return json{
      {"system",
       {{"kind", c.system.kind},
        {"r", c.system.r},
        {"l", c.system.l},
        {"mass", c.system.mass},
        {"length", c.system.length},
        {"omega0", c.system.omega0}}},
      {"process",
       {{"tau", c.process.tau},
        {"schedule", c.process.schedule},
        {"potential",
         {{"kind", c.process.potential.kind},
          {"centers", centers},
          {"sigma", c.process.potential.sigma},
          {"lambda", c.process.potential.lambda},
          {"height", c.process.potential.height},
          {"center", c.process.potential.center},
          {"width", c.process.potential.width},
          {"omega1", c.process.potential.omega1}}}}},
      {"thermal", {{"kT", c.thermal.kT}, {"hbar", c.thermal.hbar}}},
      {"engine", engine},
      {"quantum",
       {{"model", c.quantum.model},
        {"basis_size", c.quantum.basis_size},
        {"tau", c.quantum.tau},
        {"n_steps", c.quantum.n_steps},
        {"gap", c.quantum.gap},
        {"v00", c.quantum.v00},
        {"v01", c.quantum.v01},
        {"v11", c.quantum.v11},
        {"matrix_file", c.quantum.matrix_file},
        {"check_truncation", c.quantum.check_truncation}}},
      {"output", {{"dir", c.output.dir}, {"plot", c.output.plot}}},
  };
}

inline void validate(const RunConfig& c) {
  const auto& s = c.system;
  if (s.kind != "stadium" && s.kind != "box" && s.kind != "oscillator") {
    throw ConfigError("system.kind", "expected stadium, box or oscillator");
  }
  if (!(s.mass > 0.0)) throw ConfigError("system.mass", "must be positive");
  if (s.kind == "stadium") {
    if (!(s.r > 0.0)) throw ConfigError("system.r", "must be positive");
    if (!(s.l >= 0.0)) throw ConfigError("system.l", "must be nonnegative");
  }
  if (s.kind == "box" && !(s.length > 0.0)) throw ConfigError("system.length", "must be positive");
  if (s.kind == "oscillator" && !(s.omega0 > 0.0)) throw ConfigError("system.omega0", "must be positive");

  const auto& p = c.process;
  if (!(p.tau > 0.0)) throw ConfigError("process.tau", "must be positive");
  parse_schedule(p.schedule);
  const auto& v = p.potential;
  const std::string want = s.kind == "stadium" ? "gaussians" : s.kind == "box" ? "bump" : "stiffness";
  if (v.kind != want) throw ConfigError("process.potential.kind", "system '" + s.kind + "' takes '" + want + "'");
  if (v.kind == "gaussians") {
    if (!(v.sigma > 0.0)) throw ConfigError("process.potential.sigma", "must be positive");
    if (!(v.lambda >= 0.0)) throw ConfigError("process.potential.lambda", "must be nonnegative");
    if (v.centers.empty()) throw ConfigError("process.potential.centers", "must not be empty");
  }
  if (v.kind == "bump") {
    if (!(v.width > 0.0)) throw ConfigError("process.potential.width", "must be positive");
    if (!(v.height >= 0.0)) throw ConfigError("process.potential.height", "must be nonnegative");
  }
  if (v.kind == "stiffness" && !(v.omega1 > 0.0)) throw ConfigError("process.potential.omega1", "must be positive");

  if (c.thermal.kT.empty()) throw ConfigError("thermal.kT", "temperature list must not be empty");
  for (double t : c.thermal.kT) {
    if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("thermal.kT", "temperatures must be positive");
  }
  if (c.thermal.hbar.empty()) throw ConfigError("thermal.hbar", "hbar list must not be empty");
  for (double h : c.thermal.hbar) {
    if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("thermal.hbar", "values must be positive");
  }

  const auto& e = c.engine;
  if (e.samples < 1) throw ConfigError("engine.samples", "must be >= 1");
  if (e.free_energy_samples < 1) throw ConfigError("engine.free_energy_samples", "must be >= 1");
  if (!(e.u_max > 0.0)) throw ConfigError("engine.u_max", "must be positive");
  if (e.n_points < 2) throw ConfigError("engine.n_points", "must be >= 2");
  if (e.dt < 0.0) throw ConfigError("engine.dt", "must be >= 0 (0 selects tau/1000)");
  if (e.s_step_max < 0.0) throw ConfigError("engine.s_step_max", "must be >= 0");
  parse_window(e.window);
  if (!(e.broadening_bins > 0.0)) throw ConfigError("engine.broadening_bins", "must be positive");
  if (e.bins != "fd" && e.bins != "aligned") {
    try {
      std::size_t pos = 0;
      const long n = std::stol(e.bins, &pos);
      if (pos != e.bins.size() || n < 10) throw ConfigError("engine.bins", "an integer count must be >= 10");
    } catch (const std::logic_error&) {
      throw ConfigError("engine.bins", "expected fd, aligned or an integer count");
    }
  }
  if (!(e.failure_budget >= 0.0 && e.failure_budget < 1.0)) {
    throw ConfigError("engine.failure_budget", "must be in [0, 1)");
  }
  if (e.bootstrap == 1) throw ConfigError("engine.bootstrap", "use 0 (off) or >= 2 replicates");

  const auto& q = c.quantum;
  if (q.model != "auto" && q.model != "two_level" && q.model != "explicit" && q.model != "none") {
    throw ConfigError("quantum.model", "expected auto, two_level, explicit or none");
  }
  if (q.basis_size < 1) throw ConfigError("quantum.basis_size", "must be >= 1");
  if (!(q.tau >= 0.0)) throw ConfigError("quantum.tau", "must be nonnegative");
  if (q.model == "two_level" && !(q.gap > 0.0)) throw ConfigError("quantum.gap", "must be positive");
  if (q.model == "explicit" && q.matrix_file.empty()) throw ConfigError("quantum.matrix_file", "required for explicit models");
}

inline RunConfig from_json(const json& j) {
  using detail::read;
  using detail::reject_unknown;
  RunConfig c;
  reject_unknown(j, "config", {"system", "process", "thermal", "engine", "quantum", "output"});
  if (j.contains("system")) {
    const auto& s = j["system"];
    reject_unknown(s, "system", {"kind", "r", "l", "mass", "length", "omega0"});
    read(s, "kind", c.system.kind, "system");
    read(s, "r", c.system.r, "system");
    read(s, "l", c.system.l, "system");
    read(s, "mass", c.system.mass, "system");
    read(s, "length", c.system.length, "system");
    read(s, "omega0", c.system.omega0, "system");
  }
  if (j.contains("process")) {
    const auto& p = j["process"];
    reject_unknown(p, "process", {"tau", "schedule", "potential"});
    read(p, "tau", c.process.tau, "process");
    read(p, "schedule", c.process.schedule, "process");
    if (p.contains("potential")) {
      const auto& v = p["potential"];
      reject_unknown(v, "process.potential",
                     {"kind", "centers", "sigma", "lambda", "height", "center", "width", "omega1"});
      auto& pc = c.process.potential;
      read(v, "kind", pc.kind, "process.potential");
      if (v.contains("centers")) {
        pc.centers.clear();
        if (!v["centers"].is_array()) throw ConfigError("process.potential.centers", "must be a list of [x, y]");
        for (const auto& e : v["centers"]) {
          if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
            throw ConfigError("process.potential.centers", "each center must be [x, y]");
          }
          pc.centers.push_back({e[0].get<double>(), e[1].get<double>()});
        }
      }
      read(v, "sigma", pc.sigma, "process.potential");
      read(v, "lambda", pc.lambda, "process.potential");
      read(v, "height", pc.height, "process.potential");
      read(v, "center", pc.center, "process.potential");
      read(v, "width", pc.width, "process.potential");
      read(v, "omega1", pc.omega1, "process.potential");
    }
  }
  if (j.contains("thermal")) {
    const auto& t = j["thermal"];
    reject_unknown(t, "thermal", {"kT", "beta", "hbar"});
    if (t.contains("kT") && t.contains("beta")) throw ConfigError("thermal", "give either kT or beta, not both");
    auto list = [&](const char* key) {
      const auto& x = t[key];
      std::vector<double> out;
      if (x.is_number()) {
        out.push_back(x.get<double>());
      } else if (x.is_array()) {
        for (const auto& e : x) {
          if (!e.is_number()) throw ConfigError(std::string("thermal.") + key, "must be numbers");
          out.push_back(e.get<double>());
        }
      } else {
        throw ConfigError(std::string("thermal.") + key, "must be a number or a list of numbers");
      }
      return out;
    };
    if (t.contains("kT")) c.thermal.kT = list("kT");
    if (t.contains("beta")) {
      c.thermal.kT.clear();
      for (double b : list("beta")) {
        if (!(b > 0.0)) throw ConfigError("thermal.beta", "must be positive");
        c.thermal.kT.push_back(1.0 / b);
      }
    }
    if (t.contains("hbar")) c.thermal.hbar = list("hbar");
  }
  if (j.contains("engine")) {
    const auto& e = j["engine"];
    reject_unknown(e, "engine",
                   {"seed", "samples", "free_energy_samples", "u_max", "n_points", "dt", "s_step_max", "window",
                    "broadening_bins", "w_min", "bins", "failure_budget", "bootstrap", "threads", "chunk"});
    auto& ec = c.engine;
    read(e, "seed", ec.seed, "engine");
    read(e, "samples", ec.samples, "engine");
    read(e, "free_energy_samples", ec.free_energy_samples, "engine");
    read(e, "u_max", ec.u_max, "engine");
    read(e, "n_points", ec.n_points, "engine");
    read(e, "dt", ec.dt, "engine");
    read(e, "s_step_max", ec.s_step_max, "engine");
    read(e, "window", ec.window, "engine");
    read(e, "broadening_bins", ec.broadening_bins, "engine");
    if (e.contains("w_min")) {
      if (e["w_min"].is_null()) {
        ec.w_min.reset();
      } else if (e["w_min"].is_number()) {
        ec.w_min = e["w_min"].get<double>();
      } else {
        throw ConfigError("engine.w_min", "must be a number or null");
      }
    }
    if (e.contains("bins")) {
      if (e["bins"].is_number_integer()) {
        ec.bins = std::to_string(e["bins"].get<long>());
      } else {
        read(e, "bins", ec.bins, "engine");
      }
    }
    read(e, "failure_budget", ec.failure_budget, "engine");
    read(e, "bootstrap", ec.bootstrap, "engine");
    read(e, "threads", ec.threads, "engine");
    read(e, "chunk", ec.chunk, "engine");
  }
  if (j.contains("quantum")) {
    const auto& q = j["quantum"];
    reject_unknown(q, "quantum",
                   {"model", "basis_size", "tau", "n_steps", "gap", "v00", "v01", "v11", "matrix_file",
                    "check_truncation"});
    auto& qc = c.quantum;
    read(q, "model", qc.model, "quantum");
    read(q, "basis_size", qc.basis_size, "quantum");
    read(q, "tau", qc.tau, "quantum");
    read(q, "n_steps", qc.n_steps, "quantum");
    read(q, "gap", qc.gap, "quantum");
    read(q, "v00", qc.v00, "quantum");
    read(q, "v01", qc.v01, "quantum");
    read(q, "v11", qc.v11, "quantum");
    read(q, "matrix_file", qc.matrix_file, "quantum");
    read(q, "check_truncation", qc.check_truncation, "quantum");
  }
  if (j.contains("output")) {
    const auto& o = j["output"];
    reject_unknown(o, "output", {"dir", "plot"});
    read(o, "dir", c.output.dir, "output");
    read(o, "plot", c.output.plot, "output");
  }
  validate(c);
  return c;
}

/// Applies "a.b.c=value" to a JSON document. The value is parsed as JSON when
/// possible and kept as a string otherwise.
inline void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError(assignment, "override must look like key.path=value");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::exception&) {
    value = text;
  }
  json* node = &doc;
  std::stringstream ss(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->is_object()) throw ConfigError(path, "cannot descend into a non-object");
    node = &(*node)[parts[i]];
    if (node->is_null()) *node = json::object();
  }
  (*node)[parts.back()] = value;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::exception& e) {
    throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
  }
}

/// Reads a config file and applies key.path=value overrides in order. Relative
/// paths inside the config resolve against the file's directory.
inline RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {}) {
  json doc = read_json_file(path);
  for (const auto& o : overrides) apply_override(doc, o);
  RunConfig cfg = from_json(doc);
  cfg.base_dir = std::filesystem::absolute(path).parent_path().string();
  return cfg;
}

/// Canonical text of the resolved config; its hash keys every output. The
/// output location and thread count do not change results and are left out.
inline std::string canonical_text(const RunConfig& c) {
  json j = to_json(c);
  j["output"].erase("dir");
  j["engine"].erase("threads");
  return j.dump();
}

// ---------------------------------------------------------------------------
// Typed views
// ---------------------------------------------------------------------------

inline Stadium make_stadium(const RunConfig& c) {
  return Stadium(StadiumGeometry{c.system.r, c.system.l}, c.system.mass);
}

inline GaussianPotential make_gaussians(const RunConfig& c) {
  const auto& v = c.process.potential;
  return GaussianPotential(v.centers, v.sigma, v.lambda);
}

inline GaussianBump1D make_bump(const RunConfig& c) {
  const auto& v = c.process.potential;
  return GaussianBump1D(v.height, v.center, v.width);
}

inline StiffnessPerturbation1D make_stiffness(const RunConfig& c) {
  return StiffnessPerturbation1D::ramp(c.system.mass, c.system.omega0, c.process.potential.omega1);
}

inline TransformOptions transform_options(const RunConfig& c) {
  TransformOptions t;
  t.window.kind = parse_window(c.engine.window);
  t.window.broadening_bins = c.engine.broadening_bins;
  t.w_min = c.engine.w_min;
  return t;
}

}  // namespace chaoswork::io
