#pragma once

#include <string>
#include <vector>

// Built-in experiment configurations, one per canonical demonstration:
// momentum kick, 1D/2D lens focusing, dispersion steering, vacancy
// robustness scans, and block-phase focusing through strong disorder.
// Each preset is a complete config-file text validated by the same parser
// as user files.

namespace exsim {

struct Preset {
  std::string name;
  std::string title;  // one-line description for the catalog
  std::string ini;    // full config text
};

const std::vector<Preset>& preset_catalog();
// nullptr when the name is unknown.
const Preset* find_preset(const std::string& name);

}  // namespace exsim
