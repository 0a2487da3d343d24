#pragma once

#include "nvflow/types.hpp"

#include <utility>

namespace nvflow::prop {

/// Free-space diffusion kernel (4 pi D dt)^{-3/2} exp(-|r-r0|^2/4 D dt).
double free_diffusion_time(const Vec3& r, const Vec3& r0, double dt, double D);

/// Constant-drift kernel: Gaussian centered on r0 + v dt.
double drift_diffusion_time(const Vec3& r, const Vec3& r0, double dt, double D,
                            const Vec3& v);

/// Half-space kernel with a reflecting wall at z = d (NV at the origin,
/// fluid fills z >= d). Image source at z0 -> 2d - z0.
double planar_images_time(const Vec3& r, const Vec3& r0, double dt, double D, double d);

/// Frequency-domain drift-diffusion kernel for constant drift. The root k1
/// lies in the upper half plane for every omega, so the kernel decays.
cplx drift_diffusion_freq(const Vec3& r, const Vec3& r0, double omega, double D,
                          const Vec3& v);

/// Radial Green function g_lm(x, x') of the rotating-sphere model in rescaled
/// coordinates x = r sqrt(|~w|/D); reflecting boundary at x = sqrt(|wbar|).
/// The sign of wbar_signed selects the (+-i)^{1/2} branch; value is in units
/// of 1/(d D).
cplx spherical_radial_green(int l, double x, double x_prime, double omega_bar_signed);

/// Green function of the r^-2 rotation profile at omega = 0, x = r/d >= 1;
/// beta_prime = m omega_v / omega_D. Value in units of 1/(d D).
cplx rotation_r2_green(int l, double x, double x_prime, double beta_prime);

/// lambda_{+-} exponents of the r^-2 rotation model.
std::pair<cplx, cplx> rotation_r2_exponents(int l, double beta_prime);

} // namespace nvflow::prop
