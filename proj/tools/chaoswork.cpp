// chaoswork <subcommand> --config <file> [--seed N] [--samples N] [--out DIR] [--plot]

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "chaoswork/io/runner.hpp"

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kBudget = 3, kFilesystem = 4, kOther = 5 };

int report(const std::string& kind, const std::string& message, int code,
           nlohmann::ordered_json extra = nlohmann::ordered_json::object()) {
  nlohmann::ordered_json j{{"error", kind}, {"message", message}};
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  std::cerr << j.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  namespace io = chaoswork::io;
  CLI::App app{"Semiclassical, classical and quantum work statistics of driven systems"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<std::size_t> threads;
  std::string out;
  bool plot = false;
  bool print_config = false;
  bool quiet = false;

  const std::map<std::string, std::string> blurb{
      {"semiclassical", "G_SC(u) and P_SC(W) from the dephasing representation"},
      {"classical", "two-point classical work histogram and dF"},
      {"quantum", "exact P_Q(W) of a small quantum model"},
      {"jarzynski", "<exp(-beta W)> exp(beta dF) for each kT, hbar"},
      {"compare", "P_SC against the classical and quantum references"},
      {"limits", "L1(P_SC, P_C) along the hbar list"},
  };
  for (const auto& name : io::subcommands()) {
    auto* sub = app.add_subcommand(name, blurb.at(name));
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--seed", seed, "override engine.seed");
    sub->add_option("--samples", samples, "override engine.samples");
    sub->add_option("--out", out, "output directory");
    sub->add_flag("--plot", plot, "also write SVG plots");
    sub->add_option("--set", overrides, "override a config entry, e.g. engine.u_max=0.25");
    sub->add_option("--threads", threads, "worker threads (0 = all cores)");
    sub->add_flag("--print-config", print_config, "print the resolved config and exit");
    sub->add_flag("-q,--quiet", quiet, "no progress messages");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  const std::string subcommand = app.get_subcommands().front()->get_name();

  io::RunConfig cfg;
  try {
    cfg = io::load_config(config_path, overrides);
    if (seed) cfg.engine.seed = *seed;
    if (samples) cfg.engine.samples = *samples;
    if (threads) cfg.engine.threads = *threads;
    if (!out.empty()) cfg.output.dir = out;
    if (plot) cfg.output.plot = true;
    io::validate(cfg);
  } catch (const chaoswork::ConfigError& e) {
    return report("config", e.what(), kConfig, {{"field", e.field()}, {"reason", e.reason()}});
  } catch (const io::FilesystemError& e) {
    return report("config", e.what(), kConfig);
  }

  if (print_config) {
    std::cout << io::to_json(cfg).dump(2) << '\n';
    return kOk;
  }

  try {
    const auto res = io::run(subcommand, cfg, io::RunOptions{quiet});
    std::cout << res.manifest_path.string() << '\n';
  } catch (const chaoswork::ConfigError& e) {
    return report("config", e.what(), kConfig, {{"field", e.field()}, {"reason", e.reason()}});
  } catch (const chaoswork::FailureBudgetExceeded& e) {
    return report("failure_budget", e.what(), kBudget, {{"failed", e.failed()}, {"total", e.total()}});
  } catch (const io::FilesystemError& e) {
    return report("filesystem", e.what(), kFilesystem);
  } catch (const std::filesystem::filesystem_error& e) {
    return report("filesystem", e.what(), kFilesystem);
  } catch (const chaoswork::NumericalFailure& e) {
    nlohmann::ordered_json extra{{"state", e.state()}, {"time", e.time()}};
    return report("numerical", e.what(), kOther, extra);
  } catch (const std::exception& e) {
    return report("internal", e.what(), kOther);
  }
  return kOk;
}
