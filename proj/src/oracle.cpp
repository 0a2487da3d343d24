#include "nvflow/oracle.hpp"
#include "nvflow/constants.hpp"
#include "nvflow/propagator.hpp"
#include "nvflow/quadrature.hpp"
#include "nvflow/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace nvflow::oracle {

using constants::pi;
using constants::sqrt_pi;

namespace {

double dipole_field(const Vec3& r) {
    const double r2 = r.squaredNorm();
    const double rn = std::sqrt(r2);
    return (3.0 * r.z() * r.z() / r2 - 1.0) / (r2 * rn);
}

// Dipolar field averaged over an isotropic Gaussian of per-axis variance
// s2 centered at c: the traceless part smooths through the Coulomb kernel
// phi = erf(c/a)/c (a^2 = 2 s2), the trace restores (4 pi/3) x Gaussian.
double dipole_field_smoothed(const Vec3& c, double s2) {
    const double a = std::sqrt(2.0 * s2);
    const double cn = c.norm();
    const double gauss3 = std::pow(pi * a * a, -1.5) * std::exp(-c.squaredNorm() / (a * a));
    if (cn < 1e-9 * a) return 4.0 * pi / 3.0 * gauss3;
    const double g0 = 2.0 / (a * sqrt_pi) * std::exp(-cn * cn / (a * a));
    const double E = std::erf(cn / a);
    const double phi1 = g0 / cn - E / (cn * cn);
    const double phi2 = -2.0 / (a * a) * g0 - 2.0 * g0 / (cn * cn) + 2.0 * E / (cn * cn * cn);
    const double mu2 = (c.z() / cn) * (c.z() / cn);
    return (phi2 - phi1 / cn) * mu2 + phi1 / cn + 4.0 * pi / 3.0 * gauss3;
}

struct Accumulator {
    double sum = 0.0, sum2 = 0.0;
    long n = 0;
    void add(double x) {
        sum += x;
        sum2 += x * x;
        ++n;
    }
    EstimateWithError estimate() const {
        const double mean = sum / n;
        const double var = std::max(0.0, sum2 / n - mean * mean);
        return {mean, std::sqrt(var / n), n};
    }
};

// inverse CDF of the half-space 1/r^3 radial density by Newton iteration
double halfspace_radius(double u, double d, double R) {
    const double norm = std::log(R / d) + d / R - 1.0;
    const double target = u * norm;
    double r = d * std::exp(target); // ignores the d/r piece; good start
    for (int it = 0; it < 60; ++it) {
        const double f = std::log(r / d) + d / r - 1.0 - target;
        const double fp = 1.0 / r - d / (r * r);
        double step = fp != 0.0 ? f / fp : 0.0;
        double rn = r - step;
        if (rn <= d) rn = 0.5 * (r + d);
        if (rn >= R) rn = 0.5 * (r + R);
        if (std::abs(rn - r) < 1e-14 * r) {
            r = rn;
            break;
        }
        r = rn;
    }
    return std::clamp(r, d, R);
}

} // namespace

// The analytic correlation kernels carry fixed field-normalization constants
// on top of the bare pair average <f f>: 2 pi for the half space, 3 pi for
// the whole space and 4 pi for the wall-confined layer (where the reflection
// image coincides with the source and doubles the kernel). The estimator
// reports in the same units so the two routes are directly comparable.
double kernel_norm(WalkerGeometry geometry) {
    switch (geometry) {
    case WalkerGeometry::HalfSpace: return 2.0 * constants::pi;
    case WalkerGeometry::FreeSpace: return 3.0 * constants::pi;
    default: return 4.0 * constants::pi;
    }
}

McResult mc_correlation(WalkerGeometry geometry, const PhysicalParams& params,
                        const std::vector<double>& t_grid, long n_walkers,
                        double box_radius, std::uint64_t seed) {
    if (t_grid.empty()) throw DomainError("mc_correlation: empty time grid");
    for (size_t i = 0; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > 0.0)) throw DomainError("mc_correlation: times must be > 0");
        if (i > 0 && t_grid[i] <= t_grid[i - 1])
            throw DomainError("mc_correlation: t_grid must be increasing");
    }
    if (n_walkers < 1000) throw DomainError("mc_correlation: need at least 1e3 walkers");
    const double d = params.d, D = params.D, v = params.v;
    const double n = params.n * kernel_norm(geometry);
    const double R = box_radius;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<Accumulator> acc(t_grid.size());

    if (geometry == WalkerGeometry::HalfSpace) {
        if (R < 20.0 * d) throw DomainError("mc_correlation: box_radius must be >= 20 d");
        const double zq = 2.0 * pi * (std::log(R / d) + d / R - 1.0);
        for (long w = 0; w < n_walkers; ++w) {
            const double r0 = halfspace_radius(uni(rng), d, R);
            const double mu = d / r0 + uni(rng) * (1.0 - d / r0);
            const double ph = 2.0 * pi * uni(rng);
            const double st = std::sqrt(std::max(0.0, 1.0 - mu * mu));
            Vec3 pos(r0 * st * std::cos(ph), r0 * st * std::sin(ph), r0 * mu);
            const double weight = n * zq * (3.0 * mu * mu - 1.0);
            double t_prev = 0.0;
            for (size_t k = 0; k < t_grid.size(); ++k) {
                const double sig = std::sqrt(2.0 * D * (t_grid[k] - t_prev));
                pos += sig * Vec3(gauss(rng), gauss(rng), gauss(rng));
                if (pos.z() < d) pos.z() = 2.0 * d - pos.z(); // reflecting wall
                acc[k].add(weight * dipole_field(pos));
                t_prev = t_grid[k];
            }
        }
    } else if (geometry == WalkerGeometry::FreeSpace) {
        const double eps = 1e-6 * std::sqrt(D * t_grid.front());
        const double zq = 4.0 * pi * std::log(R / eps);
        const Vec3 drift(v, 0.0, 0.0);
        for (long w = 0; w < n_walkers; ++w) {
            const double r0 = eps * std::pow(R / eps, uni(rng));
            const double mu = 2.0 * uni(rng) - 1.0;
            const double ph = 2.0 * pi * uni(rng);
            const double st = std::sqrt(std::max(0.0, 1.0 - mu * mu));
            Vec3 pos(r0 * st * std::cos(ph), r0 * st * std::sin(ph), r0 * mu);
            const double weight = n * zq * (3.0 * mu * mu - 1.0);
            double t_prev = 0.0;
            for (size_t k = 0; k < t_grid.size(); ++k) {
                const double dt = t_grid[k] - t_prev;
                const Vec3 center = pos + drift * dt;
                acc[k].add(weight * dipole_field_smoothed(center, 2.0 * D * dt));
                const double sig = std::sqrt(2.0 * D * dt);
                pos = center + sig * Vec3(gauss(rng), gauss(rng), gauss(rng));
                t_prev = t_grid[k];
            }
        }
    } else { // Plane2D: spins confined to z = d, areal density n
        if (R < 20.0 * d) throw DomainError("mc_correlation: box_radius must be >= 20 d");
        const double zq = 2.0 * pi * (1.0 / d - 1.0 / std::sqrt(R * R + d * d));
        for (long w = 0; w < n_walkers; ++w) {
            const double u = uni(rng) * (1.0 / d - 1.0 / std::sqrt(R * R + d * d));
            const double rr = 1.0 / d - u; // 1/sqrt(rho^2+d^2)
            const double rho0 = std::sqrt(std::max(0.0, 1.0 / (rr * rr) - d * d));
            const double ph = 2.0 * pi * uni(rng);
            Eigen::Vector2d prho(rho0 * std::cos(ph), rho0 * std::sin(ph));
            const double r2 = rho0 * rho0 + d * d;
            const double f0 = (3.0 * d * d / r2 - 1.0) / (r2 * std::sqrt(r2));
            const double weight = n * zq * f0 * std::pow(r2, 1.5);
            double t_prev = 0.0;
            for (size_t k = 0; k < t_grid.size(); ++k) {
                const double sig = std::sqrt(2.0 * D * (t_grid[k] - t_prev));
                prho += sig * Eigen::Vector2d(gauss(rng), gauss(rng));
                const double rt2 = prho.squaredNorm() + d * d;
                acc[k].add(weight * (3.0 * d * d / rt2 - 1.0) / (rt2 * std::sqrt(rt2)));
                t_prev = t_grid[k];
            }
        }
    }

    McResult out;
    out.estimates.reserve(acc.size());
    double min_err = 1e300;
    for (const auto& a : acc) {
        out.estimates.push_back(a.estimate());
        min_err = std::min(min_err, out.estimates.back().std_err);
    }
    out.tail_bound = (geometry == WalkerGeometry::Plane2D)
                         ? 2.0 * n / std::pow(R, 4)
                         : 1.7 * n / std::pow(R, 3);
    out.truncation_warning = out.tail_bound > 0.1 * min_err;
    return out;
}

double quad_spectrum(const std::function<double(double)>& correlation_fn, double omega,
                     double t_max, double tol, double tail_exponent) {
    if (!(t_max > 0.0)) throw DomainError("quad_spectrum: t_max must be > 0");
    const double w = std::abs(omega);

    auto integrand = [&](double t) { return std::cos(w * t) * correlation_fn(t); };

    // oscillation-aware panels, never wider than a quarter half-period; each
    // panel gets an absolute error share of the overall budget
    const double max_panel = w > 0.0 ? pi / (4.0 * w) : t_max / 32.0;
    const double n_expected = t_max / max_panel + 40.0;
    double total = 0.0, scale = 0.0;
    double t0 = 0.0;
    double panel = std::min(t_max / 32.0, max_panel);
    bool first = true;
    while (t0 < t_max) {
        const double t1 = std::min(t0 + panel, t_max);
        quadrature::QuadOptions opt;
        // the first panel bootstraps the error budget; a looser relative goal
        // there keeps the t -> 0 cancellation noise of the integrand harmless
        opt.rel_tol = first ? 1e-6 : 1e-9;
        // floor the local target at the evaluation noise of the correlation so
        // panels sitting on a cancellation plateau cannot subdivide forever
        const double local = std::abs(correlation_fn(0.5 * (t0 + t1))) * (t1 - t0);
        opt.abs_tol = std::max({1e-300, 0.5 * tol * scale / n_expected, 1e-5 * local});
        double p;
        try {
            p = quadrature::integrate(integrand, t0, t1, opt);
        } catch (const ConvergenceFailure&) {
            opt.abs_tol *= 30.0; // noisy plateau; accept the evaluation floor
            p = quadrature::integrate(integrand, t0, t1, opt);
        }
        total += p;
        scale = std::max({scale, std::abs(p), std::abs(total)});
        t0 = t1;
        panel = std::min(panel * 1.5, w > 0.0 ? max_panel : 2.0 * panel);
        first = false;
    }
    double s = 2.0 * total;

    if (tail_exponent > 0.0) {
        const double p = tail_exponent;
        const double A = correlation_fn(t_max) * std::pow(t_max, p);
        double tail;
        if (w == 0.0) {
            tail = std::pow(t_max, 1.0 - p) / (p - 1.0);
        } else if (std::abs(p - 2.0) < 1e-12) {
            tail = std::cos(w * t_max) / t_max -
                   w * (0.5 * pi - specfun::sine_integral(w * t_max));
        } else {
            // int_T^inf e^{iwt} t^{-p} dt = (-iw)^{p-1} Gamma(1-p, -iwT)
            const cplx miw(0.0, -w);
            const cplx val = std::pow(miw, p - 1.0) *
                             specfun::upper_gamma(1.0 - p, miw * t_max);
            tail = val.real();
        }
        s += 2.0 * A * tail;
    }
    return s;
}

double quad_spherical_gamma(double omega_bar, double tol) {
    const double aw = std::abs(omega_bar);
    if (!(aw > 0.0)) throw DomainError("quad_spherical_gamma: omega_bar must be nonzero");
    const double a = std::sqrt(aw);
    // the kernel decays like e^{-(x - a)/sqrt2}: 120 widths is already ~1e-37
    const double cutoff = a + 120.0;
    quadrature::QuadOptions inner_opt;
    inner_opt.rel_tol = 0.05 * tol;
    inner_opt.abs_tol = 1e-13;
    quadrature::QuadOptions outer_opt = inner_opt;

    auto inner = [&](double x) {
        auto f = [&](double xp) {
            return prop::spherical_radial_green(2, x, xp, aw) / xp;
        };
        cplx left(0.0, 0.0);
        if (x > a * (1.0 + 1e-13))
            left = quadrature::integrate_complex(f, a, x, inner_opt);
        const cplx right = quadrature::integrate_to_infinity_complex(
            f, x, std::max(0.5, 0.1 * x), inner_opt);
        return (left + right) / x;
    };
    cplx total(0.0, 0.0);
    double x0 = a, w = std::max(0.5, 0.5 * a);
    while (x0 < cutoff) {
        const double x1 = std::min(x0 + w, cutoff);
        total += quadrature::integrate_complex(inner, x0, x1, outer_opt);
        x0 = x1;
        w *= 1.7;
    }
    return total.real();
}

cplx quad_rotation_r2(double beta_prime, int l, double tol) {
    quadrature::QuadOptions opt;
    opt.rel_tol = 0.05 * tol;
    opt.abs_tol = 1e-13;
    auto inner = [&](double x) {
        auto f = [&](double xp) { return prop::rotation_r2_green(l, x, xp, beta_prime) / xp; };
        const cplx left = x > 1.0 + 1e-13 ? quadrature::integrate_complex(f, 1.0, x, opt)
                                          : cplx(0.0, 0.0);
        const cplx right = quadrature::integrate_to_infinity_complex(f, x, std::max(1.0, x), opt);
        return (left + right) / x;
    };
    return quadrature::integrate_to_infinity_complex(inner, 1.0, 2.0, opt);
}

} // namespace nvflow::oracle
