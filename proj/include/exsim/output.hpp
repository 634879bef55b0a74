#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "exsim/disorder_focus.hpp"
#include "exsim/evolve.hpp"
#include "exsim/wavepacket.hpp"

// File emission: CSV for series, JSON for summaries, plain-text grids for
// masks and probability maps. Numbers print with 17 significant digits so
// identical runs produce byte-identical artifacts; the manifest lists every
// file with an FNV-1a checksum.

namespace exsim {

class OutputError : public std::runtime_error {
 public:
  explicit OutputError(const std::string& what) : std::runtime_error(what) {}
};

std::uint64_t fnv1a64(const std::string& bytes);
std::string format_double(double v);  // shortest round-trip-exact form

class OutputWriter {
 public:
  explicit OutputWriter(std::string dir);  // creates the directory

  void write_text(const std::string& name, const std::string& content);
  void write_json(const std::string& name, const nlohmann::json& j);

  // Writes manifest.json listing all artifacts with checksums plus the
  // run metadata (config echo, seed, version).
  void finalize(const nlohmann::json& meta);

  const std::string& dir() const { return m_dir; }

 private:
  std::string m_dir;
  std::vector<nlohmann::json> m_entries;
};

// Sample series as CSV.
std::string run_record_csv(const RunRecord& rec);
// Per-cell probability grid, one text row per y line, zeros on vacancies.
std::string probability_grid_text(const ExcitonState& state);
// Folded k spectrum: columns k (rad/m) and weight per axis point (1D) or
// kx, ky, weight (2D).
std::string kspectrum_csv(const KSpectrum& ks);
// Ensemble rows and summary.
std::string enhancement_csv(const EnhancementReport& rep);
nlohmann::json enhancement_json(const EnhancementReport& rep);

}  // namespace exsim
