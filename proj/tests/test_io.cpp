#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "json.hpp"

#include "chaoswork/io/config.hpp"
#include "chaoswork/io/csv.hpp"
#include "chaoswork/io/manifest.hpp"
#include "chaoswork/io/runner.hpp"
#include "chaoswork/io/svg.hpp"

using namespace chaoswork;
using namespace chaoswork::io;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("chaoswork_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream(p) << s;
}

std::string slurp(const fs::path& p) { return read_file(p); }

int run_cli(const std::string& args, const fs::path& err) {
  const std::string cmd = std::string(CHAOSWORK_CLI) + " " + args + " -q > /dev/null 2> " + err.string();
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

const char* kSmallStadium = R"({
  "system": {"kind": "stadium"},
  "process": {"tau": 0.1, "potential": {"kind": "gaussians", "lambda": 180.0}},
  "thermal": {"kT": 256, "hbar": 1.0},
  "engine": {"seed": 4, "samples": 300, "u_max": 0.25, "n_points": 9, "dt": 0.0005,
             "free_energy_samples": 2000, "bootstrap": 20, "threads": 2, "chunk": 16},
  "quantum": {"model": "none"}
})";

}  // namespace

TEST(Config, DefaultsRoundTrip) {
  RunConfig c;
  c.thermal.kT = {32.0, 256.0};
  c.engine.w_min = -300.0;
  const auto again = from_json(to_json(c));
  EXPECT_EQ(canonical_text(again), canonical_text(c));
  EXPECT_EQ(again.engine.w_min, -300.0);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  try {
    from_json(json::parse(R"({"engine": {"smaples": 10}})"));
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "engine.smaples");
  }
  EXPECT_THROW(from_json(json::parse(R"({"thermal": {"kT": -1}})")), ConfigError);
  EXPECT_THROW(from_json(json::parse(R"({"engine": {"bins": 5}})")), ConfigError);
  EXPECT_THROW(from_json(json::parse(R"({"system": {"kind": "box"}})")), ConfigError);
  EXPECT_THROW(from_json(json::parse(R"({"thermal": {"kT": 1, "beta": 1}})")), ConfigError);
}

TEST(Config, BetaAndOverrides) {
  auto doc = json::parse(R"({"thermal": {"beta": [0.5, 0.25]}})");
  apply_override(doc, "engine.u_max=0.125");
  apply_override(doc, "engine.window=hann");
  const auto c = from_json(doc);
  EXPECT_EQ(c.thermal.kT, (std::vector<double>{2.0, 4.0}));
  EXPECT_EQ(c.engine.u_max, 0.125);
  EXPECT_EQ(c.engine.window, "hann");
  EXPECT_THROW(apply_override(doc, "novalue"), ConfigError);
}

TEST(Config, HashIgnoresOutputLocation) {
  RunConfig a, b;
  b.output.dir = "/somewhere/else";
  b.engine.threads = 7;
  EXPECT_EQ(sha256_hex(canonical_text(a)), sha256_hex(canonical_text(b)));
  b.engine.seed = 2;
  EXPECT_NE(sha256_hex(canonical_text(a)), sha256_hex(canonical_text(b)));
}

TEST(Csv, FullPrecision) {
  CharFunc cf;
  cf.u = {0.0, 0.1};
  cf.g = {1.0, {0.1 + 0.2, -1.0 / 3.0}};
  cf.std_error = {0.0, 0.01};
  const auto text = char_func_csv(cf);
  std::istringstream in(text);
  std::string header, row0, row1;
  std::getline(in, header);
  std::getline(in, row0);
  std::getline(in, row1);
  EXPECT_EQ(header, "u,re_g,im_g,stderr");
  std::istringstream cells(row1);
  std::string u, re, im;
  std::getline(cells, u, ',');
  std::getline(cells, re, ',');
  std::getline(cells, im, ',');
  EXPECT_EQ(std::stod(re), 0.1 + 0.2);
  EXPECT_EQ(std::stod(im), -1.0 / 3.0);
}

TEST(Svg, SinglePointAndLegend) {
  PlotStyle st;
  st.config_hash = "abc123";
  const auto one = emit_plot({{"only", {1.0}, {2.0}}}, st);
  EXPECT_NE(one.find("<svg"), std::string::npos);
  EXPECT_NE(one.find("</svg>"), std::string::npos);
  std::size_t circles = 0;
  for (std::size_t p = one.find("<circle"); p != std::string::npos; p = one.find("<circle", p + 1)) ++circles;
  EXPECT_EQ(circles, 1u);
  EXPECT_NE(one.find("config-sha256: abc123"), std::string::npos);
  const auto two = emit_plot({{"semiclassical", {0, 1, 2}, {0, 1, 0}}, {"classical", {0, 1, 2}, {0, 0.5, 0}}}, st);
  EXPECT_NE(two.find(">semiclassical<"), std::string::npos);
  EXPECT_NE(two.find(">classical<"), std::string::npos);
  EXPECT_THROW(emit_plot({}, st), ContractError);
  EXPECT_THROW(emit_plot({{"bad", {1.0, 2.0}, {1.0}}}, st), ContractError);
}

TEST(Manifest, ChecksumsVerify) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  const auto dir = scratch("manifest");
  OutputSet out(dir);
  out.write("a.txt", "hello\n");
  out.write("b.txt", "world\n");
  EXPECT_TRUE(out.verify().empty());
  write_text(dir / "b.txt", "tampered\n");
  EXPECT_EQ(out.verify(), (std::vector<std::string>{"b.txt"}));
}

TEST(Runner, DeterministicAcrossRunsAndThreads) {
  auto cfg = from_json(json::parse(kSmallStadium));
  cfg.output.dir = scratch("det_a").string();
  const auto a = run("semiclassical", cfg, {true});
  cfg.output.dir = scratch("det_b").string();
  cfg.engine.threads = 1;
  const auto b = run("semiclassical", cfg, {true});
  ASSERT_EQ(a.manifest["files"].size(), b.manifest["files"].size());
  for (std::size_t k = 0; k < a.manifest["files"].size(); ++k) {
    EXPECT_EQ(a.manifest["files"][k]["sha256"], b.manifest["files"][k]["sha256"])
        << a.manifest["files"][k]["name"];
  }
  EXPECT_EQ(a.manifest["config_sha256"], b.manifest["config_sha256"]);
}

TEST(Cli, ClassicalZeroStrengthSingleBin) {
  const auto dir = scratch("cli_zero");
  auto doc = json::parse(kSmallStadium);
  doc["process"]["potential"]["lambda"] = 0.0;
  doc["engine"]["bins"] = "fd";
  write_text(dir / "cfg.json", doc.dump());
  ASSERT_EQ(run_cli("classical --config " + (dir / "cfg.json").string() + " --out " + (dir / "out").string(),
                    dir / "err.txt"),
            0)
      << slurp(dir / "err.txt");
  // Work vanishes up to rounding; the histogram has one bin at ~0.
  std::istringstream in(slurp(dir / "out" / "classical_kT256_pw.csv"));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "w,density");
  int rows = 0;
  double w = 1.0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
    w = std::stod(line.substr(0, line.find(',')));
  }
  const auto report = json::parse(slurp(dir / "out" / "classical_kT256.json"));
  EXPECT_LE(rows, 2);
  EXPECT_NEAR(w, 0.0, 1e-6);
  EXPECT_NEAR(report["distribution"]["mean"].get<double>(), 0.0, 1e-9);
  EXPECT_EQ(report["delta_f"].get<double>(), 0.0);
}

TEST(Cli, JarzynskiQuantumExact) {
  const auto dir = scratch("cli_jar");
  ASSERT_EQ(run_cli("jarzynski --config " + std::string(CHAOSWORK_CONFIGS) + "/explicit_matrix.json --out " +
                        (dir / "out").string(),
                    dir / "err.txt"),
            0)
      << slurp(dir / "err.txt");
  const auto j = json::parse(slurp(dir / "out" / "jarzynski_kT1_hbar1.json"));
  EXPECT_NEAR(j["quantum"]["ratio"].get<double>(), 1.0, 1e-10);
}

TEST(Cli, SemiclassicalTwiceByteIdentical) {
  const auto dir = scratch("cli_twice");
  write_text(dir / "cfg.json", kSmallStadium);
  for (const char* sub : {"a", "b"}) {
    ASSERT_EQ(run_cli("semiclassical --config " + (dir / "cfg.json").string() + " --plot --out " +
                          (dir / sub).string(),
                      dir / "err.txt"),
              0)
        << slurp(dir / "err.txt");
  }
  for (const auto& e : fs::directory_iterator(dir / "a")) {
    const auto name = e.path().filename();
    if (name == "semiclassical_manifest.json") continue;
    EXPECT_EQ(slurp(e.path()), slurp(dir / "b" / name)) << name;
  }
  const auto m = json::parse(slurp(dir / "a" / "semiclassical_manifest.json"));
  for (const auto& f : m["files"]) {
    EXPECT_EQ(sha256_hex(slurp(dir / "a" / f["name"].get<std::string>())), f["sha256"].get<std::string>());
  }
  EXPECT_TRUE(fs::exists(dir / "a" / "semiclassical_kT256_hbar1_pw.svg"));
}

TEST(Cli, StructuredErrors) {
  const auto dir = scratch("cli_err");
  write_text(dir / "bad.json", R"({"engine": {"u_max": -1}})");
  EXPECT_EQ(run_cli("semiclassical --config " + (dir / "bad.json").string(), dir / "err.txt"), 2);
  const auto err = json::parse(slurp(dir / "err.txt"));
  EXPECT_EQ(err["error"], "config");
  EXPECT_EQ(err["field"], "engine.u_max");
  EXPECT_EQ(run_cli("semiclassical --config " + (dir / "missing.json").string(), dir / "err2.txt"), 2);
  // A two-level model has no classical counterpart for `compare`, but it does
  // for the quantum subcommand.
  write_text(dir / "stadium_quantum.json", R"({"quantum": {"model": "auto"}, "engine": {"samples": 10}})");
  EXPECT_EQ(run_cli("quantum --config " + (dir / "stadium_quantum.json").string() + " --out " +
                        (dir / "o").string(),
                    dir / "err3.txt"),
            2);
}
