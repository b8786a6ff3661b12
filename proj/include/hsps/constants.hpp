#pragma once

#include <numbers>

namespace hsps::constants {

// CODATA 2018.
inline constexpr double speed_of_light = 299792458.0;         // m/s
inline constexpr double hbar = 1.054571817e-34;               // J s
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Ratio between a Gaussian's FWHM and its standard deviation, 2*sqrt(2 ln 2).
inline constexpr double fwhm_per_sigma = 2.3548200450309493;

inline double omega_from_wavelength(double lambda) { return two_pi * speed_of_light / lambda; }
inline double wavelength_from_omega(double omega) { return two_pi * speed_of_light / omega; }

/// Linearized conversion of a wavelength width around `center` to angular frequency.
inline double omega_width_from_wavelength_width(double width, double center)
{
    return two_pi * speed_of_light * width / (center * center);
}

}  // namespace hsps::constants
