#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "nvflow/constants.hpp"
#include "nvflow/correlations.hpp"
#include "nvflow/oracle.hpp"
#include "nvflow/spectra.hpp"

#include <cmath>

using namespace nvflow;
using doctest::Approx;
using constants::pi;

namespace {
PhysicalParams reduced_params(double v = 0.0) {
    PhysicalParams p;
    p.d = 1.0;
    p.D = 1.0;
    p.v = v;
    p.n = 1.0;
    p.gamma_e = 1.0;
    p.gamma_n = 1.0;
    return p;
}
} // namespace

TEST_CASE("quad_spectrum: closed-form pairs") {
    // exponential correlation -> Lorentzian
    const double tau = 0.7;
    auto expc = [&](double t) { return std::exp(-t / tau); };
    for (double w : {0.0, 0.5, 3.0}) {
        const double want = 2.0 * tau / (1.0 + w * w * tau * tau);
        CHECK(oracle::quad_spectrum(expc, w, 60.0 * tau, 1e-9, 0.0) ==
              Approx(want).epsilon(1e-8));
    }

    // constant on finite support -> sinc
    auto box = [](double t) { return t < 2.0 ? 1.0 : 0.0; };
    for (double w : {0.8, 2.5}) {
        CHECK(oracle::quad_spectrum(box, w, 2.0, 1e-9, 0.0) ==
              Approx(2.0 * std::sin(2.0 * w) / w).epsilon(1e-7));
    }

    // linearity in the integrand
    auto g1 = [&](double t) { return std::exp(-t); };
    auto g2 = [&](double t) { return std::exp(-2.0 * t); };
    auto combo = [&](double t) { return 0.3 * g1(t) + 1.7 * g2(t); };
    const double w = 1.3;
    CHECK(oracle::quad_spectrum(combo, w, 50.0, 1e-9, 0.0) ==
          Approx(0.3 * oracle::quad_spectrum(g1, w, 50.0, 1e-9, 0.0) +
                 1.7 * oracle::quad_spectrum(g2, w, 50.0, 1e-9, 0.0))
              .epsilon(1e-9));
}

TEST_CASE("quad_spectrum matches the planar closed form (power-law tail path)") {
    auto g = [](double t) { return corr::planar_correlation(t, 1, 1, 1); };
    CHECK(oracle::quad_spectrum(g, 0.25, 2e4, 1e-7, 1.5) ==
          Approx(6.0098862015430506).epsilon(1e-5));
    CHECK(oracle::quad_spectrum(g, 0.0, 2e4, 1e-7, 1.5) ==
          Approx(spectra::planar_spectrum_lowfreq(0.0, 1, 1, 1)).epsilon(2e-3));
}

TEST_CASE("quad_spherical_gamma against the closed form") {
    for (double w : {0.01, 1.0, 100.0}) {
        CHECK(oracle::quad_spherical_gamma(w, 1e-6) ==
              Approx(spectra::gamma_spherical(w)).epsilon(1e-4));
    }
    // as1 coefficients visible at small argument
    CHECK(oracle::quad_spherical_gamma(0.01, 1e-6) ==
          Approx(4.0 / 27.0 - 0.1 / (9.0 * constants::sqrt2)).epsilon(1e-2));
    // even in the sign of omega_bar
    CHECK(oracle::quad_spherical_gamma(-1.0, 1e-6) ==
          Approx(oracle::quad_spherical_gamma(1.0, 1e-6)).epsilon(1e-10));
}

TEST_CASE("rotation-model quadrature validates the closed form") {
    const cplx q0 = oracle::quad_rotation_r2(0.0, 2, 1e-8);
    CHECK(q0.real() == Approx(4.0 / 27.0).epsilon(1e-6));
    const cplx q1 = oracle::quad_rotation_r2(1.0, 2, 1e-8);
    CHECK(q1.real() == Approx(spectra::rotation_r2_spectrum_zero(1.0, 1)).epsilon(1e-5));
    const cplx q6 = oracle::quad_rotation_r2(6.25, 2, 1e-8);
    CHECK(q6.real() == Approx(spectra::rotation_r2_spectrum_zero(6.25, 1)).epsilon(1e-5));
}

TEST_CASE("MC walkers: half space") {
    const auto p = reduced_params();
    const std::vector<double> ts{1e-3, 0.1, 1.0};
    const auto mc = oracle::mc_correlation(oracle::WalkerGeometry::HalfSpace, p, ts, 200000,
                                           50.0, 20240601);
    REQUIRE(mc.estimates.size() == 3);
    for (size_t k = 0; k < ts.size(); ++k) {
        const double want = corr::planar_correlation(ts[k], 1, 1, 1);
        const double err = mc.estimates[k].std_err;
        INFO("t=", ts[k], " mc=", mc.estimates[k].value, " want=", want, " err=", err);
        CHECK(std::abs(mc.estimates[k].value - want) < 3.0 * err);
        CHECK(err < 0.05 * want); // estimator actually resolves the value
    }
    CHECK(mc.tail_bound == Approx(1.7 * 2.0 * pi / std::pow(50.0, 3)).epsilon(1e-12));
    CHECK(!mc.truncation_warning);

    // determinism
    const auto mc2 = oracle::mc_correlation(oracle::WalkerGeometry::HalfSpace, p, ts, 50000,
                                            50.0, 99);
    const auto mc3 = oracle::mc_correlation(oracle::WalkerGeometry::HalfSpace, p, ts, 50000,
                                            50.0, 99);
    CHECK(mc2.estimates[1].value == mc3.estimates[1].value);

    // stderr ~ 1/sqrt(n): doubling the walkers shrinks it by sqrt2 within 8%
    const auto half = oracle::mc_correlation(oracle::WalkerGeometry::HalfSpace, p, {1.0}, 100000,
                                             50.0, 5);
    const auto full = oracle::mc_correlation(oracle::WalkerGeometry::HalfSpace, p, {1.0}, 200000,
                                             50.0, 5);
    const double ratio = half.estimates[0].std_err / full.estimates[0].std_err;
    CHECK(ratio > 1.30);
    CHECK(ratio < 1.53);

    CHECK_THROWS_AS(oracle::mc_correlation(oracle::WalkerGeometry::HalfSpace, p, {1.0}, 100,
                                           50.0, 1),
                    DomainError);
    CHECK_THROWS_AS(oracle::mc_correlation(oracle::WalkerGeometry::HalfSpace, p, {1.0, 0.5},
                                           5000, 50.0, 1),
                    DomainError);
}

TEST_CASE("MC walkers: free space") {
    // drift-free: agreement with the closed form is exact in the mean
    {
        const auto p = reduced_params(0.0);
        const auto mc = oracle::mc_correlation(oracle::WalkerGeometry::FreeSpace, p, {1.0},
                                               300000, 40.0, 31415);
        const double want = corr::whole_space_drift_correlation(1.0, 1.0, 1e-12, 1.0);
        INFO("mc=", mc.estimates[0].value, " want=", want, " err=", mc.estimates[0].std_err);
        CHECK(std::abs(mc.estimates[0].value - want) < 3.0 * mc.estimates[0].std_err);
        CHECK(mc.estimates[0].std_err < 0.03 * want);
    }
    // drift-dominated late times expose the closed form's excess decay (its
    // v-dependence does not track the sampled process; ledger entry)
    {
        const auto p = reduced_params(1.0);
        const std::vector<double> ts{0.05, 0.2, 3.0};
        const auto mc = oracle::mc_correlation(oracle::WalkerGeometry::FreeSpace, p, ts, 200000,
                                               40.0, 777);
        for (size_t k = 0; k < 2; ++k) {
            const double want = corr::whole_space_drift_correlation(ts[k], 1.0, 1.0, 1.0);
            const double err = mc.estimates[k].std_err;
            INFO("t=", ts[k], " mc=", mc.estimates[k].value, " want=", want, " err=", err);
            CHECK(std::abs(mc.estimates[k].value - want) < 3.0 * err);
            CHECK(err < 0.05 * std::abs(want));
        }
        const double want3 = corr::whole_space_drift_correlation(3.0, 1.0, 1.0, 1.0);
        CHECK(mc.estimates[2].value < want3); // sampled process decorrelates less
        CHECK(mc.estimates[2].value > 0.6 * want3);
    }
}

TEST_CASE("MC walkers: confined 2D layer") {
    const auto p = reduced_params();
    const std::vector<double> ts{1.0};
    const auto mc = oracle::mc_correlation(oracle::WalkerGeometry::Plane2D, p, ts, 400000,
                                           60.0, 4242);
    const double want = corr::planar_correlation_2d(1.0, 1, 1, 1);
    INFO("mc=", mc.estimates[0].value, " want=", want, " err=", mc.estimates[0].std_err);
    CHECK(std::abs(mc.estimates[0].value - want) < 3.0 * mc.estimates[0].std_err);
    CHECK(mc.estimates[0].std_err < 0.05 * want);
}
