#pragma once

#include <stdexcept>
#include <string>

// All internal quantities are SI with angular frequencies in rad/s.
// Configuration files and presets carry human units (kHz, GHz, nm, us, D,
// kV/cm, W/cm^2, ...); parse_* converts them at the boundary. Plain
// frequencies are multiplied by 2*pi on the way in, so a coupling written
// as "22.83 kHz" enters the Hamiltonian as 2*pi*22.83e3 rad/s.

namespace exsim::units {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double c_light = 2.99792458e8;        // m/s
inline constexpr double eps0 = 8.8541878128e-12;       // F/m
inline constexpr double debye = 3.33564095198152e-30;  // C m
inline constexpr double au_dipole = 8.4783536255e-30;  // C m (e*a0)
inline constexpr double au_polarizability = 1.64877727436e-41;  // C^2 m^2 / J

class UnitError : public std::runtime_error {
 public:
  explicit UnitError(const std::string& what) : std::runtime_error(what) {}
};

// Each parser accepts "<number> [unit]" and returns the value in internal
// units. Missing units fall back to the base unit noted per function.
double parse_frequency(const std::string& text);       // rad/s (base: rad/s)
double parse_length(const std::string& text);          // m (base: m)
double parse_time(const std::string& text);            // s (base: s)
double parse_efield(const std::string& text);          // V/m (base: V/m)
double parse_intensity(const std::string& text);       // W/m^2 (base: W/m^2)
double parse_dipole(const std::string& text);          // C m (base: C m)
double parse_polarizability(const std::string& text);  // C^2 m^2/J (base: SI)
double parse_angle(const std::string& text);           // rad (base: rad)
double parse_plain(const std::string& text);           // dimensionless

}  // namespace exsim::units
