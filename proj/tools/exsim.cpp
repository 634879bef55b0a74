// exsim: simulates controlled energy transfer in 1D/2D arrays of coupled
// two-level monomers — momentum kicks, lens focusing, dispersion steering,
// and disorder ensembles — from structured-text configs or built-in presets.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "exsim/config.hpp"
#include "exsim/evolve.hpp"
#include "exsim/presets.hpp"
#include "exsim/runner.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

exsim::ConfigFile load(const std::string& config_path, const std::string& preset) {
  if (!preset.empty()) {
    const exsim::Preset* p = exsim::find_preset(preset);
    if (!p) throw exsim::ConfigError("unknown preset '" + preset + "'; see list-presets");
    return exsim::ConfigFile::parse(p->ini);
  }
  return exsim::ConfigFile::parse_file(config_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exciton transfer control simulator"};
  app.require_subcommand(1);

  std::string config_path, preset, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<double> tolerance;

  auto add_source = [&](CLI::App* cmd) {
    auto* c = cmd->add_option("--config", config_path, "config file path");
    auto* p = cmd->add_option("--preset", preset, "built-in preset name");
    c->excludes(p);
    p->excludes(c);
  };

  CLI::App* run = app.add_subcommand("run", "run an experiment and write artifacts");
  add_source(run);
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--seed", seed, "override [experiment] seed");
  run->add_option("--jobs", jobs, "worker threads for ensembles");
  run->add_option("--tolerance", tolerance, "integrator error per unit time");

  CLI::App* validate = app.add_subcommand("validate", "parse and validate a config");
  add_source(validate);

  CLI::App* list = app.add_subcommand("list-presets", "show the preset catalog");
  std::string show;
  list->add_option("--show", show, "print the full config text of one preset");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (list->parsed()) {
      if (!show.empty()) {
        const exsim::Preset* p = exsim::find_preset(show);
        if (!p) throw exsim::ConfigError("unknown preset '" + show + "'");
        std::cout << p->ini;
        return 0;
      }
      for (const exsim::Preset& p : exsim::preset_catalog())
        std::printf("%-14s %s\n", p.name.c_str(), p.title.c_str());
      return 0;
    }

    if (config_path.empty() && preset.empty())
      throw exsim::ConfigError("need --config or --preset");
    const exsim::ConfigFile cfg = load(config_path, preset);

    if (validate->parsed()) {
      exsim::validate_config(cfg);
      std::cout << "ok\n";
      return 0;
    }

    exsim::RunnerOptions opts;
    opts.out_dir = out_dir;
    opts.seed = seed;
    opts.jobs = jobs;
    opts.tolerance = tolerance;
    const nlohmann::json summary = exsim::run_experiment(cfg, opts);
    std::cout << summary.dump(2) << "\n";
    return 0;
  } catch (const exsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const exsim::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    // Validation errors thrown by the domain modules (bad lattice, vacant
    // target, sign mismatches) are configuration problems.
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
