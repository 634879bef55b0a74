#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "exsim/config.hpp"

// Experiment orchestration: assembles the modules from a parsed config,
// runs the named experiment kind, writes the artifact files, and returns
// the summary document (also written as summary.json).

namespace exsim {

struct RunnerOptions {
  std::string out_dir;  // empty: compute everything, write nothing
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<double> tolerance;
};

nlohmann::json run_experiment(const ConfigFile& cfg, const RunnerOptions& opts);
nlohmann::json run_preset(const std::string& name, const RunnerOptions& opts);

// Full assembly and cross-field validation without running anything.
// Throws ConfigError (or a module error) on the first problem.
void validate_config(const ConfigFile& cfg);

}  // namespace exsim
