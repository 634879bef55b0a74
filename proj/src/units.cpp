#include "exsim/units.hpp"

#include <cctype>
#include <cstdlib>
#include <utility>
#include <vector>

namespace exsim::units {

namespace {

struct Split {
  double value;
  std::string unit;  // lowercased, may be empty
};

Split split_quantity(const std::string& text) {
  const char* s = text.c_str();
  char* end = nullptr;
  double v = std::strtod(s, &end);
  if (end == s) throw UnitError("expected a number, got '" + text + "'");
  std::string unit;
  for (const char* p = end; *p; ++p) {
    if (!std::isspace(static_cast<unsigned char>(*p))) unit.push_back(*p);
  }
  // Normalize micro prefixes and case. "um" and the UTF-8 mu sign are
  // treated alike; units themselves compare case-insensitively except that
  // we must not confuse mHz with MHz, so magnitude prefixes keep case.
  return {v, unit};
}

[[noreturn]] void bad_unit(const std::string& unit, const char* kind) {
  throw UnitError("unknown " + std::string(kind) + " unit '" + unit + "'");
}

std::string strip_mu(std::string u) {
  // UTF-8 "µ" (U+00B5) and "μ" (U+03BC) both become "u".
  std::string out;
  for (size_t i = 0; i < u.size(); ++i) {
    unsigned char c = u[i];
    if (c == 0xC2 && i + 1 < u.size() && static_cast<unsigned char>(u[i + 1]) == 0xB5) {
      out.push_back('u');
      ++i;
    } else if (c == 0xCE && i + 1 < u.size() && static_cast<unsigned char>(u[i + 1]) == 0xBC) {
      out.push_back('u');
      ++i;
    } else {
      out.push_back(static_cast<char>(c));
    }
  }
  return out;
}

}  // namespace

double parse_frequency(const std::string& text) {
  auto [v, unit] = split_quantity(text);
  if (unit.empty() || unit == "rad/s") return v;
  if (unit == "Hz" || unit == "hz") return two_pi * v;
  if (unit == "kHz" || unit == "khz") return two_pi * v * 1e3;
  if (unit == "MHz" || unit == "mhz") return two_pi * v * 1e6;
  if (unit == "GHz" || unit == "ghz") return two_pi * v * 1e9;
  if (unit == "THz" || unit == "thz") return two_pi * v * 1e12;
  bad_unit(unit, "frequency");
}

double parse_length(const std::string& text) {
  auto [v, unit] = split_quantity(text);
  unit = strip_mu(unit);
  if (unit.empty() || unit == "m") return v;
  if (unit == "cm") return v * 1e-2;
  if (unit == "mm") return v * 1e-3;
  if (unit == "um") return v * 1e-6;
  if (unit == "nm") return v * 1e-9;
  if (unit == "pm") return v * 1e-12;
  bad_unit(unit, "length");
}

double parse_time(const std::string& text) {
  auto [v, unit] = split_quantity(text);
  unit = strip_mu(unit);
  if (unit.empty() || unit == "s") return v;
  if (unit == "ms") return v * 1e-3;
  if (unit == "us") return v * 1e-6;
  if (unit == "ns") return v * 1e-9;
  if (unit == "ps") return v * 1e-12;
  bad_unit(unit, "time");
}

double parse_efield(const std::string& text) {
  auto [v, unit] = split_quantity(text);
  if (unit.empty() || unit == "V/m") return v;
  if (unit == "kV/m") return v * 1e3;
  if (unit == "V/cm") return v * 1e2;
  if (unit == "kV/cm") return v * 1e5;
  bad_unit(unit, "electric field");
}

double parse_intensity(const std::string& text) {
  auto [v, unit] = split_quantity(text);
  if (unit.empty() || unit == "W/m2" || unit == "W/m^2") return v;
  if (unit == "W/cm2" || unit == "W/cm^2") return v * 1e4;
  if (unit == "kW/cm2" || unit == "kW/cm^2") return v * 1e7;
  if (unit == "MW/cm2" || unit == "MW/cm^2") return v * 1e10;
  if (unit == "GW/cm2" || unit == "GW/cm^2") return v * 1e13;
  bad_unit(unit, "intensity");
}

double parse_dipole(const std::string& text) {
  auto [v, unit] = split_quantity(text);
  if (unit.empty() || unit == "C*m" || unit == "Cm") return v;
  if (unit == "D" || unit == "d") return v * debye;
  if (unit == "au") return v * au_dipole;
  bad_unit(unit, "dipole");
}

double parse_polarizability(const std::string& text) {
  auto [v, unit] = split_quantity(text);
  if (unit.empty() || unit == "SI") return v;
  if (unit == "au") return v * au_polarizability;
  bad_unit(unit, "polarizability");
}

double parse_angle(const std::string& text) {
  auto [v, unit] = split_quantity(text);
  if (unit.empty() || unit == "rad") return v;
  if (unit == "deg") return v * pi / 180.0;
  bad_unit(unit, "angle");
}

double parse_plain(const std::string& text) {
  auto [v, unit] = split_quantity(text);
  if (!unit.empty()) throw UnitError("unexpected unit '" + unit + "' on dimensionless value");
  return v;
}

}  // namespace exsim::units
