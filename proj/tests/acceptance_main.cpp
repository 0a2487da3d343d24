// Acceptance suite: one pass/fail line per criterion, every tolerance pinned
// in code. --skip-md runs the analytic criteria, --only-md the LJ-fluid one.
#include "nvflow/constants.hpp"
#include "nvflow/correlations.hpp"
#include "nvflow/mdsim.hpp"
#include "nvflow/oracle.hpp"
#include "nvflow/sensitivity.hpp"
#include "nvflow/specfun.hpp"
#include "nvflow/spectra.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <random>
#include <string>
#include <thread>
#include <vector>

using namespace nvflow;
using constants::pi;

namespace {

int n_fail = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
    std::printf("CRITERION %-2d %-44s %s  %s\n", id, name, pass ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++n_fail;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

PhysicalParams unit_params(double v = 0.0) {
    return {1.0, 1.0, v, 1.0, 1.0, 1.0, 0.0};
}

void criterion_1() {
    const double g0 = spectra::spherical_spectrum(0.0, 0.0, 1, 1.0, 1.0);
    const double r0 = spectra::rotation_r2_spectrum_zero(0.0, 1);
    const bool ok = std::abs(g0 - 4.0 / 27.0) <= 1e-10 && r0 == 4.0 / 27.0;
    report(1, "spherical zero-frequency value 4/27", ok,
           fmt("gamma(0)=%.12g rotation(0)=%.12g", g0, r0));
}

void criterion_2() {
    bool ok = true;
    std::string detail;
    for (double w : {50.0, 100.0, 200.0}) {
        const double t = spectra::gamma_spherical(w) * w * w;
        ok &= t >= 2.85 && t <= 3.15;
        detail += fmt("w=%g: %.4g  ", w, t);
    }
    report(2, "spherical high-frequency tail in [2.85,3.15]", ok, detail +
           (ok ? "" : "(exact kernel approaches 3 only as O(1/sqrt(w)); see ledger)"));
}

void criterion_3() {
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const double w = -5.0 + 10.0 * k / 99.0;
        const double wv = 0.73;
        for (int m : {-2, -1, 0, 1, 2}) {
            const double a = spectra::spherical_spectrum(w, wv, m, 1.0, 1.0);
            const double b = spectra::spherical_spectrum(w + m * wv, 0.0, m, 1.0, 1.0);
            worst = std::max(worst, std::abs(a - b) / std::max(std::abs(b), 1e-300));
        }
    }
    report(3, "Doppler-shift identity to 1e-12", worst <= 1e-12, fmt("worst rel %.3g", worst));
}

void criterion_4() {
    bool ok = true;
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
        const double w = 0.01 * std::pow(1e4, k / 9.0);
        const double quad = oracle::quad_spherical_gamma(w, 1e-6);
        const double closed = spectra::gamma_spherical(w);
        const double rel = std::abs(quad - closed) / closed;
        worst = std::max(worst, rel);
        ok &= rel <= 1e-4;
    }
    report(4, "oracle equivalence (spherical) to 1e-4", ok, fmt("worst rel %.3g", worst));
}

void criterion_5() {
    const double short_ratio = corr::planar_correlation(1e-4, 1, 1, 1) / (pi * pi / 2.0);
    const double long_ratio = corr::planar_correlation(100.0, 1, 1, 1) * std::pow(100.0, 1.5) /
                              (16.0 / 15.0 * std::pow(pi, 1.5));
    const bool ok_s = short_ratio >= 0.999 && short_ratio <= 1.001;
    const bool ok_l = long_ratio >= 0.99 && long_ratio <= 1.01;
    report(5, "planar correlation asymptotics", ok_s && ok_l,
           fmt("short %.6g long %.6g", short_ratio, long_ratio) +
               (ok_l ? "" : " (long-time constant approached as O(1/sqrt(t)); see ledger)"));
}

void criterion_6() {
    bool ok = true;
    double worst = 0.0;
    auto g = [](double t) { return corr::planar_correlation(t, 1, 1, 1); };
    for (int k = 0; k < 8; ++k) {
        const double w = 0.01 * std::pow(1e3, k / 7.0);
        const double quad = oracle::quad_spectrum(g, w, 2e4, 1e-6, 1.5);
        const double closed = spectra::planar_spectrum(w, 1, 1, 1);
        const double rel = std::abs(quad - closed) / closed;
        worst = std::max(worst, rel);
        ok &= rel <= 0.01;
    }
    report(6, "Parseval/FT consistency (planar) to 1%", ok, fmt("worst rel %.3g", worst));
}

void criterion_7() {
    bool ok = true;
    std::string detail;
    {
        std::vector<double> ts;
        for (int k = 0; k < 5; ++k) ts.push_back(0.01 * std::pow(1e3, k / 4.0));
        const auto mc = oracle::mc_correlation(oracle::WalkerGeometry::HalfSpace, unit_params(),
                                               ts, 100000, 50.0, 240807);
        for (size_t k = 0; k < ts.size(); ++k) {
            const double want = corr::planar_correlation(ts[k], 1, 1, 1);
            const double pull = (mc.estimates[k].value - want) / mc.estimates[k].std_err;
            ok &= std::abs(pull) <= 3.0;
            detail += fmt("hs:%.2g ", pull);
        }
    }
    {
        std::vector<double> ts;
        for (int k = 0; k < 5; ++k) ts.push_back(0.01 * std::pow(1e3, k / 4.0));
        const auto mc = oracle::mc_correlation(oracle::WalkerGeometry::FreeSpace, unit_params(1.0),
                                               ts, 100000, 40.0, 240808);
        for (size_t k = 0; k < ts.size(); ++k) {
            const double want = corr::whole_space_drift_correlation(ts[k], 1.0, 1.0, 1.0);
            const double pull = (mc.estimates[k].value - want) / mc.estimates[k].std_err;
            ok &= std::abs(pull) <= 3.0;
            detail += fmt("fs:%.2g ", pull);
        }
    }
    report(7, "Monte-Carlo oracle within 3 sigma", ok, detail);
}

void criterion_8() {
    const double t_small = 1e-10; // vt/sqrt(Dt) = 1e-5 at D = v = 1
    const double r1 = corr::whole_space_drift_correlation(t_small, 1, 1, 1) /
                      (8.0 * std::pow(pi, 1.5) / (15.0 * std::pow(t_small, 1.5)));
    const double r2 = corr::whole_space_drift_correlation(100.0, 1, 1, 1) /
                      (8.0 * pi * pi / std::pow(100.0, 3));
    const bool ok1 = std::abs(r1 - 1.0) <= 1e-3;
    const bool ok2 = std::abs(r2 - 1.0) <= 1e-2;
    report(8, "drift-correlation limits", ok1 && ok2,
           fmt("no-drift ratio %.6f, long-time ratio %.4f", r1, r2) +
               (ok2 ? "" : " (1 - 6D/(v^2 t) correction = 6% at t = 100 D/v^2; see ledger)"));
}

void criterion_10() {
    PhysicalParams water{10e-9, 2.3e-9, 1e-3, 33e27,
                         constants::gamma_electron, constants::gamma_proton, 100e-6};
    const double dvv = sens::lorentzian_velocity_uncertainty(water) / water.v;
    const bool ok1 = std::abs(dvv / 3e3 - 1.0) <= 0.20;

    sens::MeasurementBudget budget; // x10 penalty, 50/sqrt(um^2) gain, 1 um^2, T=1
    const double dvv_ens = sens::lorentzian_velocity_uncertainty(water, &budget) / water.v;
    const bool ok2 = std::abs(dvv_ens / 600.0 - 1.0) <= 0.20;

    PhysicalParams w15 = water;
    w15.d = 15e-9;
    const double dv_int = sens::intermediate_uncertainty(w15);
    const bool ok3 = std::abs(dv_int / 10e-3 - 1.0) <= 0.30;

    const double dvv_low = sens::lowfreq_uncertainty(w15, &budget) / w15.v;
    const bool ok4 = std::abs(dvv_low / 0.3 - 1.0) <= 0.30;

    const double ratio = sens::depth_ensemble_uncertainty_ratio(water, 5e-9, 30e-9);
    const bool ok5 = std::abs(ratio / 1.45 - 1.0) <= 0.05;

    report(10, "sensitivity numbers (water)", ok1 && ok2 && ok3 && ok4 && ok5,
           fmt("dv/v=%.0f ens=%.0f dv_int=%.2g", dvv, dvv_ens, dv_int) +
               fmt(" low=%.2f depth-ratio=%.3f", dvv_low, ratio) +
               (ok5 ? "" : " (<S>-averaged estimator improves, not degrades; see ledger)"));
}

void criterion_11() {
    std::mt19937_64 rng(1789);
    std::uniform_real_distribution<double> mag(0.1, 10.0), arg(-3.14, 3.14);
    bool ok_w = true;
    double worst_w = 0.0;
    for (int k = 0; k < 100; ++k) {
        const cplx z = mag(rng) * std::exp(cplx(0.0, arg(rng)));
        for (int l = 0; l <= 2; ++l) {
            const cplx w = specfun::sph_hankel(1, l, z) * specfun::sph_hankel_deriv(2, l, z) -
                           specfun::sph_hankel_deriv(1, l, z) * specfun::sph_hankel(2, l, z);
            const cplx want = cplx(0.0, -2.0) / (z * z);
            const double rel = std::abs(w - want) / std::abs(want);
            worst_w = std::max(worst_w, rel);
            ok_w &= rel <= 1e-9;
        }
    }

    // kelvin vs direct complex-Bessel series evaluation at 50 random points
    std::uniform_real_distribution<double> xk(1e-3, 20.0);
    bool ok_k = true;
    double worst_k = 0.0;
    for (int k = 0; k < 50; ++k) {
        const double x = xk(rng);
        const int n = k % 3;
        const auto kv = specfun::kelvin(n, x);
        const cplx jb = specfun::besselj_complex(n, x * std::exp(cplx(0.0, 0.75 * pi)));
        const cplx kb = std::exp(cplx(0.0, -0.5 * n * pi)) *
                        specfun::besselk_complex(n, x * std::exp(cplx(0.0, 0.25 * pi)));
        const double rel =
            std::max(std::abs(cplx(kv.ber, kv.bei) - jb) / std::abs(jb),
                     std::abs(cplx(kv.ker, kv.kei) - kb) / std::abs(kb));
        worst_k = std::max(worst_k, rel);
        ok_k &= rel <= 1e-9;
    }

    // hyp1f4 vs long-double partial-sum oracle at 20 points
    bool ok_h = true;
    double worst_h = 0.0;
    std::uniform_real_distribution<double> zdist(-8.0, 4.0);
    for (int k = 0; k < 20; ++k) {
        const double z = zdist(rng);
        const std::array<double, 4> b{0.75 + (k % 3), 1.25, 1.75, 2.25 + 0.5 * (k % 2)};
        const double a = 1.0 + 0.25 * (k % 4);
        long double term = 1.0L, sum = 1.0L;
        for (int j = 0; j < 400; ++j) {
            term *= (static_cast<long double>(a) + j) * static_cast<long double>(z) /
                    ((b[0] + j) * (b[1] + j) * (b[2] + j) * (b[3] + j) * (j + 1.0L));
            sum += term;
            if (std::abs(static_cast<double>(term)) < 1e-22 * std::abs(static_cast<double>(sum)))
                break;
        }
        const double got = specfun::hyp1f4(a, b, z);
        const double rel = std::abs(got - static_cast<double>(sum)) /
                           std::abs(static_cast<double>(sum));
        worst_h = std::max(worst_h, rel);
        ok_h &= rel <= 1e-10;
    }

    report(11, "special-function suite", ok_w && ok_k && ok_h,
           fmt("wronskian %.2g kelvin %.2g hyp1f4 %.2g", worst_w, worst_k, worst_h));
}

void criterion_9() {
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    // (a) NVE energy drift on a 100-particle system at the production step size
    bool ok_a = false;
    double drift = 1.0;
    {
        md::SimConfig c;
        c.Lx = c.Ly = c.Lz = 5.02;
        c.N = 100;
        c.thermostat_steps = 3000;
        c.seed = 9;
        md::Simulation sim(c, 9);
        sim.init_thermal();
        const double e0 = sim.total_energy();
        double emax = e0, emin = e0;
        for (int s = 0; s < 10000; ++s) {
            sim.step_velocity_verlet();
            const double e = sim.total_energy();
            emax = std::max(emax, e);
            emin = std::min(emin, e);
        }
        drift = (emax - emin) / (std::abs(e0) + 150.0);
        ok_a = drift < 1e-4;
    }
    report(9, "(a) NVE energy drift < 1e-4", ok_a, fmt("drift %.3g (%.0fs)", drift, elapsed()));

    // (d) synthetic-data fit recovery (cheap; do it before the long sweep)
    bool ok_d = false;
    {
        const double b_true = -0.42, c_true = 0.053;
        std::mt19937_64 rng(5);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<double> v{0.0, 0.05, 0.1, 0.2, 0.4, 0.8};
        std::vector<EstimateWithError> s0;
        for (double x : v) {
            const double clean = 1.0 + b_true * std::sqrt(x) + c_true * x;
            s0.push_back({clean * (1.0 + 0.01 * gauss(rng)), 0.01 * clean, 1});
        }
        const auto fit = md::fit_sqrt_model(v, s0);
        ok_d = std::abs(fit.b - b_true) < fit.b_ci95 && std::abs(fit.c - c_true) < fit.c_ci95 &&
               fit.r_squared > 0.99;
        report(9, "(d) synthetic sqrt-fit recovery", ok_d,
               fmt("b=%.3f+-%.3f c=%.3f", fit.b, fit.b_ci95, fit.c));
    }

    // (b),(c): the desk-scale sweep
    md::SimConfig c;
    c.Lx = 40.0;
    c.Ly = 12.0;
    c.Lz = 10.8;
    c.density = 0.79; // N = 4095
    c.nv_depth = 5.0;
    c.thermostat_steps = 10000;
    c.n_steps = 200000;
    c.n_runs = 20;
    c.seed = 20240808;
    const std::vector<double> vels{0.0, 0.1, 0.2, 0.4, 0.8};
    const int threads = std::max(1u, std::thread::hardware_concurrency());

    std::vector<std::vector<double>> per_run_s0(vels.size()); // paired across v by run seed
    std::vector<EstimateWithError> s0(vels.size());
    for (size_t iv = 0; iv < vels.size(); ++iv) {
        md::SimConfig cv = c;
        cv.drift_v = vels[iv];
        const auto runs = md::run_ensemble(cv, threads);
        // band-average below omega = 0.05 (reduced units), per run and pooled
        for (const auto& r : runs) {
            const auto sc = md::estimate_spectrum({r});
            double acc = 0.0;
            long cnt = 0;
            for (Eigen::Index i = 0; i < sc.omegas.size(); ++i) {
                if (sc.omegas[i] > 0.05 && i > 0) break;
                acc += sc.values[i];
                ++cnt;
            }
            per_run_s0[iv].push_back(acc / cnt);
        }
        double mean = 0.0;
        for (double x : per_run_s0[iv]) mean += x;
        mean /= per_run_s0[iv].size();
        double var = 0.0;
        for (double x : per_run_s0[iv]) var += (x - mean) * (x - mean);
        var /= per_run_s0[iv].size() * (per_run_s0[iv].size() - 1.0);
        s0[iv] = {mean, std::sqrt(var), static_cast<long>(per_run_s0[iv].size())};
        std::fprintf(stderr, "  [md] v=%.2f S0=%.4g +- %.2g (%.0fs elapsed)\n", vels[iv],
                     mean, s0[iv].std_err, elapsed());
    }

    // (b) strictly decreasing beyond 1 sigma, using run-paired differences
    bool ok_b = true;
    std::string detail_b;
    for (size_t iv = 0; iv + 1 < vels.size(); ++iv) {
        double dmean = 0.0, dvar = 0.0;
        const size_t nr = per_run_s0[iv].size();
        for (size_t r = 0; r < nr; ++r) dmean += per_run_s0[iv][r] - per_run_s0[iv + 1][r];
        dmean /= nr;
        for (size_t r = 0; r < nr; ++r) {
            const double d = per_run_s0[iv][r] - per_run_s0[iv + 1][r] - dmean;
            dvar += d * d;
        }
        const double derr = std::sqrt(dvar / (nr * (nr - 1.0)));
        ok_b &= dmean > derr;
        detail_b += fmt("%.2gsig ", dmean / derr);
    }
    report(9, "(b) S(0;v) strictly decreasing beyond 1 sigma", ok_b, detail_b);

    // (c) sqrt fit on the normalized S(0): b < 0 at 95%, R^2 > 0.9
    std::vector<EstimateWithError> s0n(vels.size());
    for (size_t iv = 0; iv < vels.size(); ++iv) {
        const double norm = s0[0].value;
        const double rel = std::sqrt(
            s0[iv].std_err * s0[iv].std_err / (s0[iv].value * s0[iv].value) +
            s0[0].std_err * s0[0].std_err / (s0[0].value * s0[0].value));
        s0n[iv] = {s0[iv].value / norm, std::max(1e-12, s0[iv].value / norm * rel), 1};
    }
    const auto fit = md::fit_sqrt_model(vels, s0n);
    const bool ok_c = fit.b + fit.b_ci95 < 0.0 && fit.r_squared > 0.9;
    report(9, "(c) fit b < 0 at 95%, R^2 > 0.9", ok_c,
           fmt("b=%.3f+-%.3f R2=%.3f", fit.b, fit.b_ci95, fit.r_squared) +
               fmt(" (%.0fs total)", elapsed()));
}

} // namespace

int main(int argc, char** argv) {
    bool skip_md = false, only_md = false;
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--skip-md")) skip_md = true;
        if (!std::strcmp(argv[i], "--only-md")) only_md = true;
    }
    if (!only_md) {
        criterion_1();
        criterion_2();
        criterion_3();
        criterion_4();
        criterion_5();
        criterion_6();
        criterion_7();
        criterion_8();
        criterion_10();
        criterion_11();
    }
    if (!skip_md) criterion_9();
    std::printf("acceptance: %d failing check(s)\n", n_fail);
    return n_fail == 0 ? 0 : 1;
}
