#include "nvflow/spectra.hpp"
#include "nvflow/constants.hpp"
#include "nvflow/specfun.hpp"

#include <cmath>

namespace nvflow::spectra {

using constants::pi;
using constants::sqrt2;

double gamma_spherical(double omega_bar) {
    const double aw = std::abs(omega_bar);
    if (aw == 0.0) return 4.0 / 27.0; // removable point
    const cplx s = specfun::sqrt_plus_i() * std::sqrt(aw);
    const cplx s2 = s * s, s3 = s2 * s;
    const cplx f = (1.0 + 0.25 * s) / (1.0 + s + 4.0 / 9.0 * s2 + s3 / 9.0);
    return 4.0 / 27.0 * f.real();
}

double spherical_spectrum(double omega, double omega_v, int m, double d, double D) {
    if (!(d > 0.0) || !(D > 0.0)) throw DomainError("spherical_spectrum: d, D must be > 0");
    const double omega_D = D / (d * d);
    const double shifted = (omega + m * omega_v) / omega_D;
    return gamma_spherical(shifted) / (d * D);
}

double spherical_spectrum_lowfreq(double omega, double omega_v, int m, double d, double D) {
    const double omega_D = D / (d * d);
    const double aw = std::abs(omega + m * omega_v) / omega_D;
    return (4.0 / 27.0 - std::sqrt(aw) / (9.0 * sqrt2)) / (d * D);
}

bool spherical_lowfreq_in_range(double omega, double omega_v, int m, double d, double D) {
    const double omega_D = D / (d * d);
    return std::abs(omega + m * omega_v) / omega_D < 0.1;
}

double rotation_r2_spectrum_zero(double omega_v_over_omega_D, int m) {
    // Green-function route (power-law exponents), written in the l = 2 form
    // 4 Re{(3+5S)/(1+5S)^3}, S = sqrt(1 + i beta), beta = (4/25) m wv/wD.
    const cplx beta = cplx(0.0, m * omega_v_over_omega_D) * (4.0 / 25.0);
    const cplx s = std::sqrt(1.0 + beta);
    const cplx den = 1.0 + 5.0 * s;
    return (4.0 * (3.0 + 5.0 * s) / (den * den * den)).real();
}

namespace {

double kelvin_block(double aw, double d, double D, double& max_abs) {
    using specfun::kelvin;
    const double X = 2.0 * std::sqrt(aw / D) * d;
    const auto k0 = kelvin(0, X);
    const auto k1 = kelvin(1, X);
    const auto k2 = kelvin(2, X);
    const double t1 = -3.0 * sqrt2 / (aw * d * d * d) * (0.5 * pi * k2.ber + k2.kei);
    const double t2 = 2.0 * sqrt2 / (D * d) * (-0.5 * pi * k0.bei + k0.ker);
    const double t3 = 3.5 / (std::sqrt(aw * D) * d * d) *
                      (k1.ker - k1.kei - 0.5 * pi * k1.bei - 0.5 * pi * k1.ber);
    const double t4 = -2.0 * std::sqrt(aw) / std::pow(D, 1.5) *
                      (0.5 * pi * k1.ber - 0.5 * pi * k1.bei + k1.kei + k1.ker);
    for (double t : {t1, t2, t3, t4}) max_abs = std::max(max_abs, std::abs(t));
    return t1 + t2 + t3 + t4;
}

} // namespace

PlanarSpectrumResult planar_spectrum_detail(double omega, double d, double D, double n) {
    if (!(d > 0.0) || !(D > 0.0) || !(n > 0.0))
        throw DomainError("planar_spectrum: d, D, n must be > 0");
    if (omega == 0.0) return {planar_spectrum_lowfreq(0.0, d, D, n), 1.0, false};
    const double aw = std::abs(omega);
    const double z = -std::pow(d, 4) * omega * omega / (16.0 * D * D);
    const double sq = std::sqrt(aw);
    const double d2 = d * d, d4 = d2 * d2, d6 = d4 * d2, d8 = d4 * d4;
    const double D32 = std::pow(D, 1.5), D52 = std::pow(D, 2.5), D72 = std::pow(D, 3.5);
    const double D92 = std::pow(D, 4.5), D112 = std::pow(D, 5.5);
    const double w32 = aw * sq, w52 = aw * aw * sq, w72 = w52 * aw, w92 = w72 * aw;

    auto F = [&](double a, double b1, double b2, double b3, double b4) {
        return specfun::hyp1f4(a, {b1, b2, b3, b4}, z);
    };
    const double terms[] = {
        8.0 / 5.0 * sq / D32 * F(1, 0.75, 1.25, 1.75, 2.25),
        -56.0 / 225.0 * w32 * d2 / D52 * F(1, 1.75, 1.75, 2.25, 2.25),
        -224.0 / 225.0 * w32 * d2 / D52 * F(2, 1.75, 1.75, 2.25, 2.25),
        32.0 / 105.0 * w32 * d2 / D52 * F(1, 1.25, 1.75, 2.25, 2.75),
        -64.0 / 225.0 * w52 * d4 / D72 * F(1, 1.75, 1.75, 2.25, 2.25),
        32.0 / 225.0 * w52 * d4 / D72 * F(1, 1.75, 2.25, 2.25, 2.75),
        128.0 / 1575.0 * w72 * d6 / D92 * F(1, 1.75, 2.25, 2.25, 2.75),
        -256.0 / 11025.0 * w72 * d6 / D92 * F(1, 2.25, 2.25, 2.75, 2.75),
        -512.0 / 99225.0 * w92 * d8 / D112 * F(1, 2.25, 2.75, 2.75, 3.25),
        3.0 * D / (sqrt2 * omega * omega * std::pow(d, 5)),
        -8.0 / 3.0 * sq / D32,
        -8.0 / 9.0 * w32 * d2 / D52,
        32.0 / 45.0 * w52 * d4 / D72,
    };
    double sum = 0.0, max_abs = 0.0;
    for (double t : terms) {
        sum += t;
        max_abs = std::max(max_abs, std::abs(t));
    }
    sum += kelvin_block(aw, d, D, max_abs);
    const double value = 2.0 * n * sqrt2 * pi * pi * sum;
    const double cancel = max_abs / std::max(std::abs(sum), 1e-300);
    return {value, cancel, cancel > 1e6};
}

double planar_spectrum(double omega, double d, double D, double n) {
    return planar_spectrum_detail(omega, d, D, n).value;
}

double planar_spectrum_lowfreq(double omega, double d, double D, double n) {
    const double aw = std::abs(omega);
    return n * pi * pi * (1.5 / (d * D)
                          - 32.0 * sqrt2 / 15.0 * std::sqrt(aw) / std::pow(D, 1.5)
                          + 1.25 * pi * d * aw / (D * D));
}

bool planar_lowfreq_in_range(double omega, double d, double D) {
    return std::abs(omega) * d * d / D < 0.1;
}

std::vector<DopplerEstimate> doppler_estimate(double omega, double omega_D,
                                              double omega_v, double gamma0_at_zero) {
    if (!(omega_D > 0.0)) throw DomainError("doppler_estimate: omega_D must be > 0");
    std::vector<DopplerEstimate> out;
    const double w = std::abs(omega);
    const double hi_edge = std::max(omega_D, omega_v);
    const bool high = w > hi_edge;
    const bool low = omega_v > 0.0 && w < omega_v;
    const bool near_hi = w > 0.5 * hi_edge && w < 2.0 * hi_edge;
    const bool near_lo = omega_v > 0.0 && w > 0.5 * omega_v && w < 2.0 * omega_v;

    auto add_low = [&] {
        out.push_back({DopplerRegime::Low,
                       -0.5 * gamma0_at_zero * std::sqrt(omega_v / omega_D), 0.0});
    };
    auto add_intermediate = [&] {
        out.push_back({DopplerRegime::Intermediate,
                       -0.5 * gamma0_at_zero * std::sqrt(omega_D / w) * (omega_v / omega_D),
                       0.0});
    };
    auto add_high = [&] {
        out.push_back({DopplerRegime::High, 0.0, -2.0 * omega_v / w});
    };

    if (near_hi) {
        add_high();
        add_intermediate();
    } else if (near_lo) {
        add_intermediate();
        add_low();
    } else if (high) {
        add_high();
    } else if (low) {
        add_low();
    } else {
        add_intermediate();
    }
    return out;
}

double universal_estimate(double omega, double omega_D, double C1, double C2,
                          double d, double D) {
    const double w = std::abs(omega);
    if (w <= omega_D) return (C1 - C2 * std::sqrt(w / omega_D)) / (d * D);
    const double r = omega_D / w;
    return r * r / (d * D);
}

LowDriftScaling low_drift_linear_scaling(double omega, double v, double D, double d, int m) {
    if (!(omega > 0.0)) throw DomainError("low_drift_linear_scaling: omega must be > 0");
    const bool in_range = (v * v / (D * omega) < 0.1) && (d * std::sqrt(omega / D) < 0.1);
    if (m == 0) return {0.0, in_range};
    return {v / (D * D) * std::sqrt(D / (d * d * omega)), in_range};
}

} // namespace nvflow::spectra
