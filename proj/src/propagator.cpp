#include "nvflow/propagator.hpp"
#include "nvflow/constants.hpp"
#include "nvflow/specfun.hpp"

#include <cmath>

namespace nvflow::prop {

using specfun::sph_hankel;
using specfun::sph_hankel_deriv;
using specfun::sqrt_pm_i;

double free_diffusion_time(const Vec3& r, const Vec3& r0, double dt, double D) {
    if (!(dt > 0.0)) throw DomainError("free_diffusion_time: dt must be > 0");
    if (!(D > 0.0)) throw DomainError("free_diffusion_time: D must be > 0");
    const double s2 = 4.0 * D * dt;
    const double norm = std::pow(constants::pi * s2, -1.5);
    return norm * std::exp(-(r - r0).squaredNorm() / s2);
}

double drift_diffusion_time(const Vec3& r, const Vec3& r0, double dt, double D,
                            const Vec3& v) {
    if (!(dt > 0.0)) throw DomainError("drift_diffusion_time: dt must be > 0");
    const Vec3 center = r0 + v * dt;
    const double s2 = 4.0 * D * dt;
    return std::pow(constants::pi * s2, -1.5) * std::exp(-(r - center).squaredNorm() / s2);
}

double planar_images_time(const Vec3& r, const Vec3& r0, double dt, double D, double d) {
    if (!(dt > 0.0)) throw DomainError("planar_images_time: dt must be > 0");
    if (r.z() < d || r0.z() < d)
        throw DomainError("planar_images_time: points must satisfy z >= d");
    const double s2 = 4.0 * D * dt;
    const double xy = (r.x() - r0.x()) * (r.x() - r0.x()) + (r.y() - r0.y()) * (r.y() - r0.y());
    const double dz = r.z() - r0.z();
    const double dzi = r.z() + r0.z() - 2.0 * d;
    return std::pow(constants::pi * s2, -1.5) * std::exp(-xy / s2) *
           (std::exp(-dz * dz / s2) + std::exp(-dzi * dzi / s2));
}

cplx drift_diffusion_freq(const Vec3& r, const Vec3& r0, double omega, double D,
                          const Vec3& v) {
    const Vec3 dr = r - r0;
    const double R = dr.norm();
    if (R == 0.0) throw DomainError("drift_diffusion_freq: r == r0");
    const double vmag = v.norm();
    // pole k1 = sqrt(Rho) e^{i phi/2}; phi = pi - atan(4 D w / v^2) covers all
    // quadrants: w>0 -> first, w<0 -> second, w=0 -> imaginary axis.
    double phi;
    if (vmag == 0.0) {
        phi = omega > 0.0 ? 0.5 * constants::pi
                          : (omega < 0.0 ? 1.5 * constants::pi : constants::pi);
    } else {
        phi = constants::pi - std::atan(4.0 * D * omega / (vmag * vmag));
    }
    const double rho = std::hypot(std::pow(vmag / (2.0 * D), 2), omega / D);
    const cplx k1 = std::sqrt(rho) * std::exp(cplx(0.0, 0.5 * phi));
    return std::exp(cplx(0.0, 1.0) * k1 * R) / (4.0 * constants::pi * D * R) *
           std::exp(v.dot(dr) / (2.0 * D));
}

cplx spherical_radial_green(int l, double x, double x_prime, double omega_bar_signed) {
    const double aw = std::abs(omega_bar_signed);
    const double boundary = std::sqrt(aw);
    if (x < boundary || x_prime < boundary)
        throw DomainError("spherical_radial_green: point below the reflecting boundary");
    if (aw == 0.0) throw DomainError("spherical_radial_green: omega_bar = 0 not rescalable");
    // evaluate on the +i branch; the -i branch is the complex conjugate
    const cplx u = sqrt_pm_i(+1);
    const cplx alpha = u * boundary;
    const double xg = std::max(x, x_prime), xl = std::min(x, x_prime);
    const cplx ratio = sph_hankel_deriv(2, l, alpha) / sph_hankel_deriv(1, l, alpha);
    const cplx pref = u / cplx(0.0, 2.0) * std::sqrt(aw);
    const cplx g = pref * (ratio * sph_hankel(1, l, u * xg) * sph_hankel(1, l, u * xl) -
                           sph_hankel(1, l, u * xg) * sph_hankel(2, l, u * xl));
    return omega_bar_signed >= 0.0 ? g : std::conj(g);
}

std::pair<cplx, cplx> rotation_r2_exponents(int l, double beta_prime) {
    const double lh = l + 0.5;
    const cplx beta = cplx(0.0, beta_prime) / (lh * lh);
    const cplx root = std::sqrt(1.0 + beta);
    return {cplx(-0.5, 0.0) + lh * root, cplx(-0.5, 0.0) - lh * root};
}

cplx rotation_r2_green(int l, double x, double x_prime, double beta_prime) {
    if (x < 1.0 || x_prime < 1.0)
        throw DomainError("rotation_r2_green: x must be >= 1");
    const auto [lp, lm] = rotation_r2_exponents(l, beta_prime);
    const cplx b = 1.0 / (lp - lm);
    const cplx a = -b * lp / lm;
    const double xg = std::max(x, x_prime), xl = std::min(x, x_prime);
    const cplx xg_lm = std::exp(lm * std::log(xg));
    const cplx xl_lm = std::exp(lm * std::log(xl));
    const cplx xl_lp = std::exp(lp * std::log(xl));
    return xg_lm * (a * xl_lm + b * xl_lp);
}

} // namespace nvflow::prop
