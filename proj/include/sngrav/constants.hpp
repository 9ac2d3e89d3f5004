#pragma once

// CODATA 2018 exact or recommended values, SI units.
namespace sngrav::constants {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;
inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double k_B = 1.380649e-23;            // J/K
inline constexpr double G = 6.67430e-11;               // m^3 kg^-1 s^-2
inline constexpr double c = 299792458.0;               // m/s
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg

}  // namespace sngrav::constants
