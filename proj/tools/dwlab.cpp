// dwlab: command-line front end.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dwlab/commands.hpp"
#include "dwlab/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Damped wave experiments: decay, lifespan sweeps, blow-up certificates"};
  app.require_subcommand(1);

  std::string config_path, rerun_path;
  std::vector<std::string> overrides;
  dwlab::app::CommandOptions opt;
  std::string positional_modulus;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"classify", "Condition suite and Dini verdict for a modulus"},
      {"linear", "Linear evolution with decay-rate fits"},
      {"run", "Single semilinear run"},
      {"sweep", "Semilinear runs over nonlinearities x amplitudes"},
      {"certificate", "Test-function functionals and blow-up certificate"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config,-c", config_path, "key = value configuration file")
        ->check(CLI::ExistingFile);
    sub->add_option("--out,-o", opt.out_dir, "output directory");
    sub->add_option("--workers,-j", opt.workers, "worker threads for sweeps")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", opt.seed, "recorded in manifests");
    sub->add_option("--set", overrides, "override a config key (k=v), repeatable");
    sub->add_option("--rerun", rerun_path, "reuse the configuration and seed recorded in a manifest")
        ->check(CLI::ExistingFile)
        ->excludes("--config");
    if (name == "classify") sub->add_option("modulus", positional_modulus, "modulus spec");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : dwlab::app::kUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  dwlab::Config cfg;
  try {
    if (!config_path.empty()) cfg = dwlab::Config::from_file(config_path);
    if (!rerun_path.empty()) {
      cfg = dwlab::Config::from_manifest(rerun_path);
      const auto m = dwlab::Config::from_file(rerun_path);
      if (m.has("seed")) opt.seed = static_cast<std::uint64_t>(std::stoull(m.get_string("seed", "0")));
    }
    for (const auto& kv : overrides) cfg.set_assignment(kv);
    if (!positional_modulus.empty()) cfg.set("modulus", positional_modulus);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return dwlab::app::kUsage;
  }
  return dwlab::app::dispatch(command, cfg, opt, std::cout, std::cerr);
}
