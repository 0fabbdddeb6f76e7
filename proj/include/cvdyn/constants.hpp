#pragma once

#include <numbers>

// CODATA 2018 values, SI units.
namespace cvdyn::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double boltzmann = 1.380649e-23;        // J/K
inline constexpr double gravitational = 6.67430e-11;     // m^3 kg^-1 s^-2
inline constexpr double vacuum_permeability = 1.25663706212e-6;  // N/A^2
inline constexpr double atomic_mass_unit = 1.66053906660e-27;     // kg
inline constexpr double standard_gravity = 9.80665;      // m/s^2

inline constexpr double carbon_atom_mass = 12.0 * atomic_mass_unit;
inline constexpr double air_molecule_mass = 28.97 * atomic_mass_unit;

}  // namespace cvdyn::constants
