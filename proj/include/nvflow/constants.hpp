#pragma once

namespace nvflow::constants {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double sqrt2 = 1.41421356237309504880;
inline constexpr double sqrt_pi = 1.77245385090551602730;
inline constexpr double euler_gamma = 0.57721566490153286061;

// CODATA 2018
inline constexpr double mu0 = 1.25663706212e-6;          // T m / A
inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double gamma_proton = 2.6752218744e8;   // rad/(s T)
inline constexpr double gamma_electron = 2 * pi * 28e9;  // rad/(s T)

/// (mu0 hbar gamma_n / 4 pi)^2 : squares of the dipolar coupling constant [T^2 m^6].
inline double dipole_coupling_sq(double gamma_n) {
    const double c = mu0 * hbar * gamma_n / (4.0 * pi);
    return c * c;
}

/// (mu0 hbar gamma_n gamma_e / 4 pi)^2 : converts the geometric spectral kernel
/// (units n/(d D)) into a physical rate density. One function owns these factors.
inline double spectrum_prefactor(double gamma_n, double gamma_e) {
    const double c = mu0 * hbar * gamma_n * gamma_e / (4.0 * pi);
    return c * c;
}

} // namespace nvflow::constants
