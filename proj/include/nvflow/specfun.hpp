#pragma once

#include "nvflow/types.hpp"

#include <array>

namespace nvflow::specfun {

/// Square roots of +/- i with the fixed convention that the imaginary part
/// is positive: (+i)^{1/2} = (1+i)/sqrt2, (-i)^{1/2} = (-1+i)/sqrt2.
cplx sqrt_plus_i();
cplx sqrt_minus_i();
cplx sqrt_pm_i(int sign);

/// Spherical Bessel j_l, l in {0,1,2}, complex argument. Series below |z|=1.5,
/// closed trigonometric forms beyond (the trig forms cancel badly near 0).
cplx sph_bessel_j(int l, cplx z);

/// Spherical Hankel h_l^{(kind)}, kind in {1,2}, l in {0,1,2}.
/// h_l^{(1)}(z) ~ e^{iz}(-i)^{l+1}/z, h_l^{(2)}(z) ~ e^{-iz}(i)^{l+1}/z.
cplx sph_hankel(int kind, int l, cplx z);

/// d/dz h_l^{(kind)}(z) via the standard recurrence.
cplx sph_hankel_deriv(int kind, int l, cplx z);

/// Kelvin functions ber_n, bei_n, ker_n, kei_n of order n in {0,1,2} (DLMF
/// normalization: ber+i bei = J_n(x e^{3 pi i/4}), ker+i kei = e^{-n pi i/2}
/// K_n(x e^{pi i/4})). Series for x <= 16, asymptotic expansions beyond.
struct KelvinValues {
    double ber, bei, ker, kei;
};
KelvinValues kelvin(int order, double x);

/// Literal rotated-argument Bessel values J_n(x e^{3 pi i/4}) and
/// K_n(x e^{3 pi i/4}); the latter grows with x and differs from ker/kei.
struct RotatedKelvin {
    cplx j_rot;
    cplx k_rot;
};
RotatedKelvin kelvin_rotated(int order, double x);

struct ErfFamily {
    double erf, erfc, erfcx;
};
ErfFamily erf_family(double x);

/// e^{x^2} erfc(x) without overflow for x up to 1e6.
double erfcx(double x);

double sine_integral(double x);   // Si(x) = int_0^x sin t / t dt
double cosine_integral(double x); // Ci(x), x > 0
double exp_integral_ei(double x); // Ei(x), x > 0
double gamma_fn(double a);

/// Upper incomplete gamma for complex z (series for small |z|, continued
/// fraction otherwise). Principal branch.
cplx upper_gamma(double a, cplx z);

/// E1(z) = Gamma(0, z), Re z > 0 or z off the negative real axis.
cplx exp_integral_e1(cplx z);

/// Generalized hypergeometric 1F4. Entire in z; max_terms guards runtime only.
double hyp1f4(double a, const std::array<double, 4>& b, double z,
              const SeriesControl& ctrl = {});

struct Hyp1f4Result {
    double value;
    double max_term; ///< largest |partial term|, for cancellation diagnostics
    int terms;
};
Hyp1f4Result hyp1f4_detail(double a, const std::array<double, 4>& b, double z,
                           const SeriesControl& ctrl = {});

/// Integer-order Bessel functions of complex argument (series path; the
/// kelvin() front end adds the large-x asymptotics).
cplx besselj_complex(int n, cplx z);
cplx besseli_complex(int n, cplx z);
cplx besselk_complex(int n, cplx z);

} // namespace nvflow::specfun
