#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

// Structured-text experiment configs: INI-style [section] blocks of
// key = value lines with # comments. Values carry explicit unit suffixes
// ("22.83 kHz", "400 nm"); typed getters convert into internal units
// (SI, angular frequencies in rad/s) exactly once at ingestion.

namespace exsim {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class ConfigFile {
 public:
  static ConfigFile parse(const std::string& text);
  static ConfigFile parse_file(const std::string& path);

  bool has_section(const std::string& sec) const;
  bool has(const std::string& sec, const std::string& key) const;

  // Raw string (trimmed). Throws ConfigError naming the key when absent.
  std::string raw(const std::string& sec, const std::string& key) const;
  std::string raw_or(const std::string& sec, const std::string& key,
                     const std::string& fallback) const;

  std::string get_string(const std::string& sec, const std::string& key) const;
  std::string get_string_or(const std::string& sec, const std::string& key,
                            const std::string& fallback) const;
  long get_int(const std::string& sec, const std::string& key) const;
  long get_int_or(const std::string& sec, const std::string& key, long fallback) const;
  double get_plain(const std::string& sec, const std::string& key) const;
  double get_plain_or(const std::string& sec, const std::string& key,
                      double fallback) const;

  // Unit-converting getters (see exsim/units.hpp for accepted suffixes).
  double get_frequency(const std::string& sec, const std::string& key) const;
  double get_frequency_or(const std::string& sec, const std::string& key,
                          double fallback) const;
  double get_length(const std::string& sec, const std::string& key) const;
  double get_time(const std::string& sec, const std::string& key) const;
  double get_time_or(const std::string& sec, const std::string& key,
                     double fallback) const;
  double get_efield(const std::string& sec, const std::string& key) const;
  double get_efield_or(const std::string& sec, const std::string& key,
                       double fallback) const;
  double get_intensity(const std::string& sec, const std::string& key) const;
  double get_dipole(const std::string& sec, const std::string& key) const;
  double get_polarizability(const std::string& sec, const std::string& key) const;
  double get_angle(const std::string& sec, const std::string& key) const;
  double get_angle_or(const std::string& sec, const std::string& key,
                      double fallback) const;

  // Length that also accepts lattice units: "10 a" means 10 spacings.
  double get_length_sites(const std::string& sec, const std::string& key,
                          double spacing) const;

  // Whitespace-separated lists.
  std::vector<long> get_int_list(const std::string& sec, const std::string& key) const;
  std::vector<double> get_plain_list(const std::string& sec,
                                     const std::string& key) const;
  // Comma-separated list of unit-suffixed times.
  std::vector<double> get_time_list(const std::string& sec,
                                    const std::string& key) const;

  // Every getter marks its key consumed; after assembling an experiment,
  // leftover keys are almost certainly typos or sections for a different
  // experiment kind.
  std::vector<std::string> unconsumed_keys() const;
  void mark_section_consumed(const std::string& sec) const;

  std::string original_text() const { return m_text; }

 private:
  struct Entry {
    std::string value;
  };
  std::map<std::string, std::map<std::string, Entry>> m_sections;
  mutable std::set<std::string> m_consumed;  // "section.key"
  std::string m_text;

  const std::string* find(const std::string& sec, const std::string& key) const;
};

}  // namespace exsim
