#include "exsim/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "exsim/units.hpp"

namespace exsim {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void fail(const std::string& sec, const std::string& key,
                       const std::string& msg) {
  throw ConfigError("[" + sec + "] " + key + ": " + msg);
}

}  // namespace

ConfigFile ConfigFile::parse(const std::string& text) {
  ConfigFile cf;
  cf.m_text = text;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // Strip comments: full-line or preceded by whitespace.
    if (size_t pos = line.find('#'); pos != std::string::npos) {
      if (pos == 0 || std::isspace(static_cast<unsigned char>(line[pos - 1]))) {
        line.erase(pos);
      }
    }
    const std::string t = trim(line);
    if (t.empty() || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
      }
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty()) {
        throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
      }
      cf.m_sections[section];  // allow empty sections
      continue;
    }
    const size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    if (section.empty()) {
      throw ConfigError("line " + std::to_string(lineno) + ": key outside any [section]");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    }
    auto [it, inserted] = cf.m_sections[section].emplace(key, Entry{value});
    if (!inserted) {
      throw ConfigError("duplicate key [" + section + "] " + key);
    }
  }
  return cf;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

bool ConfigFile::has_section(const std::string& sec) const {
  return m_sections.count(sec) > 0;
}

bool ConfigFile::has(const std::string& sec, const std::string& key) const {
  return find(sec, key) != nullptr;
}

const std::string* ConfigFile::find(const std::string& sec,
                                    const std::string& key) const {
  auto s = m_sections.find(sec);
  if (s == m_sections.end()) return nullptr;
  auto k = s->second.find(key);
  if (k == s->second.end()) return nullptr;
  m_consumed.insert(sec + "." + key);
  return &k->second.value;
}

std::string ConfigFile::raw(const std::string& sec, const std::string& key) const {
  const std::string* v = find(sec, key);
  if (!v) fail(sec, key, "missing required key");
  return *v;
}

std::string ConfigFile::raw_or(const std::string& sec, const std::string& key,
                               const std::string& fallback) const {
  const std::string* v = find(sec, key);
  return v ? *v : fallback;
}

std::string ConfigFile::get_string(const std::string& sec, const std::string& key) const {
  return raw(sec, key);
}

std::string ConfigFile::get_string_or(const std::string& sec, const std::string& key,
                                      const std::string& fallback) const {
  return raw_or(sec, key, fallback);
}

long ConfigFile::get_int(const std::string& sec, const std::string& key) const {
  const std::string v = raw(sec, key);
  try {
    size_t used = 0;
    const long out = std::stol(v, &used);
    if (trim(v.substr(used)).empty()) return out;
  } catch (const std::exception&) {
  }
  fail(sec, key, "expected an integer, got '" + v + "'");
}

long ConfigFile::get_int_or(const std::string& sec, const std::string& key,
                            long fallback) const {
  return has(sec, key) ? get_int(sec, key) : fallback;
}

namespace {

template <typename Fn>
double convert(const ConfigFile& cf, const std::string& sec, const std::string& key,
               Fn parser, const char* expected) {
  const std::string v = cf.raw(sec, key);
  try {
    return parser(v);
  } catch (const units::UnitError& e) {
    fail(sec, key, std::string(e.what()) + "; expected e.g. '" + expected + "'");
  }
}

}  // namespace

double ConfigFile::get_plain(const std::string& sec, const std::string& key) const {
  return convert(*this, sec, key, units::parse_plain, "0.05");
}

double ConfigFile::get_plain_or(const std::string& sec, const std::string& key,
                                double fallback) const {
  return has(sec, key) ? get_plain(sec, key) : fallback;
}

double ConfigFile::get_frequency(const std::string& sec, const std::string& key) const {
  return convert(*this, sec, key, units::parse_frequency, "22.83 kHz");
}

double ConfigFile::get_frequency_or(const std::string& sec, const std::string& key,
                                    double fallback) const {
  return has(sec, key) ? get_frequency(sec, key) : fallback;
}

double ConfigFile::get_length(const std::string& sec, const std::string& key) const {
  return convert(*this, sec, key, units::parse_length, "400 nm");
}

double ConfigFile::get_time(const std::string& sec, const std::string& key) const {
  return convert(*this, sec, key, units::parse_time, "3 us");
}

double ConfigFile::get_time_or(const std::string& sec, const std::string& key,
                               double fallback) const {
  return has(sec, key) ? get_time(sec, key) : fallback;
}

double ConfigFile::get_efield(const std::string& sec, const std::string& key) const {
  return convert(*this, sec, key, units::parse_efield, "1 kV/cm");
}

double ConfigFile::get_efield_or(const std::string& sec, const std::string& key,
                                 double fallback) const {
  return has(sec, key) ? get_efield(sec, key) : fallback;
}

double ConfigFile::get_intensity(const std::string& sec, const std::string& key) const {
  return convert(*this, sec, key, units::parse_intensity, "1e7 W/cm2");
}

double ConfigFile::get_dipole(const std::string& sec, const std::string& key) const {
  return convert(*this, sec, key, units::parse_dipole, "5.42 D");
}

double ConfigFile::get_polarizability(const std::string& sec,
                                      const std::string& key) const {
  return convert(*this, sec, key, units::parse_polarizability, "311 au");
}

double ConfigFile::get_angle(const std::string& sec, const std::string& key) const {
  return convert(*this, sec, key, units::parse_angle, "90 deg");
}

double ConfigFile::get_angle_or(const std::string& sec, const std::string& key,
                                double fallback) const {
  return has(sec, key) ? get_angle(sec, key) : fallback;
}

double ConfigFile::get_length_sites(const std::string& sec, const std::string& key,
                                    double spacing) const {
  const std::string v = raw(sec, key);
  const std::string t = trim(v);
  if (t.size() > 1 && (t.back() == 'a' || t.back() == 'A')) {
    const std::string num = trim(t.substr(0, t.size() - 1));
    try {
      return units::parse_plain(num) * spacing;
    } catch (const units::UnitError&) {
    }
  }
  return convert(*this, sec, key, units::parse_length, "10 a' or '4 um");
}

std::vector<long> ConfigFile::get_int_list(const std::string& sec,
                                           const std::string& key) const {
  std::istringstream in(raw(sec, key));
  std::vector<long> out;
  std::string tok;
  while (in >> tok) {
    try {
      size_t used = 0;
      out.push_back(std::stol(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      fail(sec, key, "expected whitespace-separated integers, got '" + tok + "'");
    }
  }
  if (out.empty()) fail(sec, key, "expected at least one integer");
  return out;
}

std::vector<double> ConfigFile::get_plain_list(const std::string& sec,
                                               const std::string& key) const {
  std::istringstream in(raw(sec, key));
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    try {
      out.push_back(units::parse_plain(tok));
    } catch (const units::UnitError&) {
      fail(sec, key, "expected whitespace-separated numbers, got '" + tok + "'");
    }
  }
  if (out.empty()) fail(sec, key, "expected at least one number");
  return out;
}

std::vector<double> ConfigFile::get_time_list(const std::string& sec,
                                              const std::string& key) const {
  const std::string v = raw(sec, key);
  std::vector<double> out;
  size_t start = 0;
  while (start <= v.size()) {
    size_t comma = v.find(',', start);
    if (comma == std::string::npos) comma = v.size();
    const std::string piece = trim(v.substr(start, comma - start));
    if (!piece.empty()) {
      try {
        out.push_back(units::parse_time(piece));
      } catch (const units::UnitError& e) {
        fail(sec, key, std::string(e.what()) + "; expected e.g. '0 us, 34.9 us'");
      }
    }
    start = comma + 1;
  }
  if (out.empty()) fail(sec, key, "expected at least one time");
  return out;
}

std::vector<std::string> ConfigFile::unconsumed_keys() const {
  std::vector<std::string> out;
  for (const auto& [sec, entries] : m_sections) {
    if (m_consumed.count(sec + ".*")) continue;
    for (const auto& [key, entry] : entries) {
      if (!m_consumed.count(sec + "." + key)) out.push_back("[" + sec + "] " + key);
    }
  }
  return out;
}

void ConfigFile::mark_section_consumed(const std::string& sec) const {
  m_consumed.insert(sec + ".*");
}

}  // namespace exsim
