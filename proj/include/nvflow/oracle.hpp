#pragma once

#include "nvflow/types.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace nvflow::oracle {

enum class WalkerGeometry { HalfSpace, FreeSpace, Plane2D };

struct McResult {
    std::vector<EstimateWithError> estimates; ///< one per t_grid entry
    double tail_bound = 0.0;                  ///< analytic bound on the r > R remainder
    bool truncation_warning = false;          ///< tail bound exceeds 10% of min stderr
};

/// Brute-force correlation estimator: initial positions importance-sampled
/// with the 1/r^3 weight of the dipolar field, trajectories stepped by exact
/// Gaussian increments (folded at z = d for the half space). The free-space
/// estimate averages the dipolar field analytically over the final Gaussian
/// gap, which keeps the estimator variance finite near the origin.
McResult mc_correlation(WalkerGeometry geometry, const PhysicalParams& params,
                        const std::vector<double>& t_grid, long n_walkers,
                        double box_radius, std::uint64_t seed);

/// Cosine transform S(w) = 2 int_0^tmax cos(wt) G(t) dt with the remainder
/// beyond t_max completed analytically from G ~ A t^{-tail_exponent}
/// (A is read off at t_max; tail_exponent <= 0 skips the completion).
double quad_spectrum(const std::function<double(double)>& correlation_fn, double omega,
                     double t_max, double tol, double tail_exponent);

/// Spherical-geometry kernel recomputed by brute double quadrature of the
/// radial Green function (no closed-form shortcuts). Units 1/(d D) with
/// d = D = 1; even in the sign of omega_bar.
double quad_spherical_gamma(double omega_bar, double tol);

/// Double log-integral of the r^-2 rotation Green function over [1,inf)^2.
cplx quad_rotation_r2(double beta_prime, int l, double tol);

} // namespace nvflow::oracle
