#pragma once

#include "nvflow/types.hpp"

#include <vector>

namespace nvflow::spectra {

/// Exact geometry kernel of the reflecting-sphere model as a function of the
/// Doppler-shifted dimensionless frequency; Gamma(0) = 4/27, Gamma ~ 3/w^2.
double gamma_spherical(double omega_bar);

/// Spherical-geometry spectrum at omega with rigid rotation at omega_v; the
/// drift enters purely as the shift ~w = omega + m omega_v. Units 1/(d D).
double spherical_spectrum(double omega, double omega_v, int m, double d, double D);

/// Low-frequency expansion (1/dD)[4/27 - (1/(9 sqrt2)) sqrt(|~w|/w_D)].
double spherical_spectrum_lowfreq(double omega, double omega_v, int m, double d, double D);
bool spherical_lowfreq_in_range(double omega, double omega_v, int m, double d, double D);

/// Zero-frequency spectrum of the r^-2 rotation profile, dimensionless
/// (units of 1/(d D)); analytic in omega_v, equals 4/27 at omega_v = 0.
double rotation_r2_spectrum_zero(double omega_v_over_omega_D, int m);

struct PlanarSpectrumResult {
    double value;
    double cancellation; ///< largest |term| over |result|
    bool precision_loss; ///< cancellation beyond 1e6; prefer the oracle path
};

/// Diffusion-only spectrum of the planar half-space geometry, two-sided
/// convention S(w) = 2 int_0^inf cos(wt) G(t) dt, bare kernel (no dipolar
/// coupling prefactor; see constants::spectrum_prefactor). Closed form with
/// 1F4 and Kelvin pieces; the individual pieces cancel heavily at small w.
PlanarSpectrumResult planar_spectrum_detail(double omega, double d, double D, double n);
double planar_spectrum(double omega, double d, double D, double n);

/// Low-frequency expansion of the same, bare kernel, two-sided convention.
double planar_spectrum_lowfreq(double omega, double d, double D, double n);
bool planar_lowfreq_in_range(double omega, double d, double D);

enum class DopplerRegime { Low, Intermediate, High };

struct DopplerEstimate {
    DopplerRegime regime;
    double delta_abs; ///< Gamma_v - Gamma_{v=0}; absolute, Low/Intermediate
    double delta_rel; ///< (Gamma_v - Gamma_{v=0}) / Gamma_{v=0}; High regime
};

/// Order-of-magnitude drift corrections by frequency regime. Returns more
/// than one entry when omega sits within a factor 2 of a regime boundary.
std::vector<DopplerEstimate> doppler_estimate(double omega, double omega_D,
                                              double omega_v, double gamma0_at_zero);

/// Geometry-agnostic estimate: (1/dD)[C1 - C2 sqrt(w/w_D)] below w_D and the
/// (1/dD)(w_D/w)^2 tail above.
double universal_estimate(double omega, double omega_D, double C1, double C2,
                          double d, double D);

struct LowDriftScaling {
    double magnitude; ///< unit-prefactor scaling (v/D^2) sqrt(D/(d^2 w))
    bool in_range;    ///< v^2/(D w) << 1 and d sqrt(w/D) << 1
};

/// Magnitude of the O(v) spectrum correction for a tilted magnetization axis;
/// vanishes identically for m = 0.
LowDriftScaling low_drift_linear_scaling(double omega, double v, double D, double d, int m);

} // namespace nvflow::spectra
