#pragma once

#include "nvflow/types.hpp"

namespace nvflow::corr {

/// Magnetic-field autocorrelation of spins diffusing in the half space above
/// the diamond surface (m = 0 dipolar component), closed form, t > 0.
/// Evaluated through erfcx so both tiny and huge t stay finite.
double planar_correlation(double t, double d, double D, double n);

/// G^{(0)} : G^{(1)} : G^{(2)} = 1 : 9 : 9.
double correlation_m_ratio(int m);

/// Same geometry but spins confined to the plane z = d (areal density n).
double planar_correlation_2d(double t, double d, double D, double n);

/// Whole-space correlation with constant drift v along x. Switches to a
/// short-drift series when vt/sqrt(Dt) is small enough to destroy the closed
/// form by cancellation.
double whole_space_drift_correlation(double t, double D, double v, double n);

/// Time at which the diffusion distance equals the drift distance: D/v^2.
double correlation_crossover_time(double D, double v);

} // namespace nvflow::corr
