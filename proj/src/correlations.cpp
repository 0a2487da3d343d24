#include "nvflow/correlations.hpp"
#include "nvflow/constants.hpp"
#include "nvflow/specfun.hpp"

#include <cmath>

namespace nvflow::corr {

using constants::pi;
using constants::sqrt_pi;
using specfun::erfcx;

double planar_correlation(double t, double d, double D, double n) {
    if (!(t > 0.0)) throw DomainError("planar_correlation: t must be > 0");
    const double Dt = D * t;
    const double x = d / std::sqrt(Dt);
    const double e = erfcx(x);
    const double core = std::pow(Dt, -1.5)
                        - 1.5 / (d * d * std::sqrt(Dt))
                        + 3.0 * std::sqrt(Dt) / (d * d * d * d)
                        - 1.5 * Dt * sqrt_pi / std::pow(d, 5)
                        + sqrt_pi * e * (-d / (Dt * Dt) + 1.0 / (d * Dt)
                                         - 1.75 / (d * d * d) + 1.5 * Dt / std::pow(d, 5))
                        + 0.25 * sqrt_pi / (d * d * d);
    return 2.0 * n * std::pow(pi, 1.5) * core;
}

double correlation_m_ratio(int m) {
    switch (m) {
    case 0: return 1.0;
    case 1: return 9.0;
    case 2: return 9.0;
    default: throw DomainError("correlation_m_ratio: m must be 0, 1 or 2");
    }
}

double planar_correlation_2d(double t, double d, double D, double n) {
    if (!(t > 0.0)) throw DomainError("planar_correlation_2d: t must be > 0");
    const double Dt = D * t;
    const double b = d / std::sqrt(Dt);
    const double bracket = 1.0 + b * b
                           - sqrt_pi * erfcx(b) * (b * b * b + 1.5 * b);
    return 4.0 * n * pi * pi / (Dt * Dt) * bracket;
}

double whole_space_drift_correlation(double t, double D, double v, double n) {
    if (!(t > 0.0)) throw DomainError("whole_space_drift_correlation: t must be > 0");
    if (v < 0.0) throw DomainError("whole_space_drift_correlation: v must be >= 0");
    const double Dt = D * t;
    const double u = 0.5 * v * t / std::sqrt(Dt); // vt / (2 sqrt(Dt))
    if (2.0 * u < 0.05) {
        // the erf and Gaussian pieces cancel to O(u^4); series keeps precision
        const double u2 = u * u;
        const double s = 1.0 / 30.0 + u2 * (-1.0 / 70.0 + u2 * (1.0 / 252.0));
        return 16.0 * std::pow(pi, 1.5) * n * std::pow(Dt, -1.5) * s;
    }
    const double vt = v * t;
    const double a = (1.0 / std::pow(vt, 3) - 6.0 * Dt / std::pow(vt, 5)) * std::erf(u);
    const double b = 6.0 / std::pow(vt, 4) * std::sqrt(Dt / pi) * std::exp(-u * u);
    return 8.0 * pi * pi * n * (a + b);
}

double correlation_crossover_time(double D, double v) {
    if (!(v > 0.0)) throw DomainError("correlation_crossover_time: v must be > 0");
    return D / (v * v);
}

} // namespace nvflow::corr
