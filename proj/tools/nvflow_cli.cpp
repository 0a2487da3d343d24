// nvflow command-line front end: spectra, correlations, MD runs and the
// oracle-vs-analytic validation suites. Every command writes CSV plus a JSON
// sidecar with the fully resolved configuration so runs can be repeated.
#include "CLI11.hpp"
#include "json.hpp"

#include "nvflow/constants.hpp"
#include "nvflow/correlations.hpp"
#include "nvflow/mdsim.hpp"
#include "nvflow/oracle.hpp"
#include "nvflow/sensitivity.hpp"
#include "nvflow/spectra.hpp"
#include "nvflow/types.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

using json = nlohmann::json;
using namespace nvflow;

namespace {

std::vector<double> parse_grid(const std::string& spec) {
    auto fail = [&] { throw DomainError("bad grid spec '" + spec + "'"); };
    std::vector<double> out;
    if (spec.rfind("log:", 0) == 0 || spec.rfind("lin:", 0) == 0) {
        const bool logspace = spec[1] == 'o';
        const std::string body = spec.substr(4);
        const auto dots = body.find("..");
        const auto colon = body.rfind(':');
        if (dots == std::string::npos || colon == std::string::npos || colon < dots) fail();
        const double a = std::stod(body.substr(0, dots));
        const double b = std::stod(body.substr(dots + 2, colon - dots - 2));
        const long n = std::stol(body.substr(colon + 1));
        if (n < 1 || (logspace && (a <= 0.0 || b <= 0.0))) fail();
        for (long i = 0; i < n; ++i) {
            const double f = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
            out.push_back(logspace ? a * std::pow(b / a, f) : a + (b - a) * f);
        }
        return out;
    }
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    if (out.empty()) fail();
    return out;
}

struct Sidecar {
    json config;
    std::string command;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    void write(const std::string& csv_path) const {
        json j;
        j["tool"] = "nvflow 0.1.0";
        j["command"] = command;
        j["config"] = config;
        j["wall_time_s"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::ofstream f(csv_path + ".json");
        f << j.dump(2) << "\n";
    }
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
    std::ofstream f(path);
    if (!f) throw DomainError("cannot open output file " + path);
    for (size_t i = 0; i < header.size(); ++i) f << (i ? "," : "") << header[i];
    f << "\n";
    const size_t rows = columns.empty() ? 0 : columns.front().size();
    for (size_t r = 0; r < rows; ++r) {
        for (size_t c = 0; c < columns.size(); ++c) f << (c ? "," : "") << fmt(columns[c][r]);
        f << "\n";
    }
}

json simconfig_to_json(const md::SimConfig& c) {
    return json{{"Lx", c.Lx},
                {"Ly", c.Ly},
                {"Lz", c.Lz},
                {"N", c.particle_count()},
                {"epsilon", c.epsilon},
                {"sigma", c.sigma},
                {"temperature", c.temperature},
                {"dt_step", c.dt_step},
                {"r_cut", c.r_cut},
                {"nv_depth", c.nv_depth},
                {"drift_v", c.drift_v},
                {"n_steps", c.n_steps},
                {"thermostat_steps", c.thermostat_steps},
                {"seed", c.seed},
                {"n_runs", c.n_runs}};
}

void simconfig_from_json(const json& j, md::SimConfig& c) {
    if (j.contains("Lx")) c.Lx = j["Lx"];
    if (j.contains("Ly")) c.Ly = j["Ly"];
    if (j.contains("Lz")) c.Lz = j["Lz"];
    if (j.contains("N")) c.N = j["N"];
    if (j.contains("epsilon")) c.epsilon = j["epsilon"];
    if (j.contains("sigma")) c.sigma = j["sigma"];
    if (j.contains("temperature")) c.temperature = j["temperature"];
    if (j.contains("dt_step")) c.dt_step = j["dt_step"];
    if (j.contains("r_cut")) c.r_cut = j["r_cut"];
    if (j.contains("nv_depth")) c.nv_depth = j["nv_depth"];
    if (j.contains("drift_v")) c.drift_v = j["drift_v"];
    if (j.contains("n_steps")) c.n_steps = j["n_steps"];
    if (j.contains("thermostat_steps")) c.thermostat_steps = j["thermostat_steps"];
    if (j.contains("seed")) c.seed = j["seed"];
    if (j.contains("n_runs")) c.n_runs = j["n_runs"];
}

void dump_field_series(const std::string& path, const md::FieldSeries& fs) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DomainError("cannot open output file " + path);
    const std::uint64_t n = fs.samples.size(), run = fs.run_id, seed = fs.seed;
    f.write(reinterpret_cast<const char*>(&n), 8);
    f.write(reinterpret_cast<const char*>(&fs.dt_sample), 8);
    f.write(reinterpret_cast<const char*>(&run), 8);
    f.write(reinterpret_cast<const char*>(&seed), 8);
    f.write(reinterpret_cast<const char*>(fs.samples.data()),
            static_cast<std::streamsize>(8 * fs.samples.size()));
}

/// low-frequency band average of an MD spectrum: S(0) estimate with stderr
EstimateWithError s0_band(const SpectrumCurve& sc, double omega_max) {
    double acc = 0.0, var = 0.0;
    long k = 0;
    for (Eigen::Index i = 0; i < sc.omegas.size(); ++i) {
        if (sc.omegas[i] > omega_max && i > 0) break;
        acc += sc.values[i];
        var += sc.std_errs[i] * sc.std_errs[i];
        ++k;
    }
    return {acc / k, std::sqrt(var) / k, k};
}

int run_validation_suite(const std::string& suite);

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"nano-NMR flow-meter numerics toolkit"};
    app.require_subcommand(1);

    std::string output = "out.csv";
    std::string cmdline;
    for (int i = 0; i < argc; ++i) cmdline += std::string(i ? " " : "") + argv[i];

    // ---- spectrum-spherical ----
    auto* sph = app.add_subcommand("spectrum-spherical",
                                   "exact reflecting-sphere spectrum vs omega/omega_D");
    std::string sph_grid = "log:1e-3..1e3:200";
    std::string sph_vt = "0";
    int sph_m = 1;
    sph->add_option("--omega-grid", sph_grid, "grid spec log:a..b:n | lin:a..b:n | list");
    sph->add_option("--v-tilde", sph_vt, "comma list of omega_v/omega_D values");
    sph->add_option("--m", sph_m, "azimuthal index of the dipolar component");
    sph->add_option("-o,--output", output, "CSV output path");

    // ---- spectrum-planar ----
    auto* pla = app.add_subcommand("spectrum-planar",
                                   "half-space diffusion spectrum vs omega/omega_D");
    std::string pla_grid = "log:1e-2..1e1:100";
    pla->add_option("--omega-grid", pla_grid, "grid spec");
    pla->add_option("-o,--output", output, "CSV output path");

    // ---- spectrum-rotation ----
    auto* rot = app.add_subcommand("spectrum-rotation",
                                   "r^-2 rotation model zero-frequency spectrum");
    std::string rot_grid = "lin:0..25:251";
    int rot_m = 1;
    rot->add_option("--omega-v-grid", rot_grid, "grid of omega_v/omega_D");
    rot->add_option("--m", rot_m, "azimuthal index");
    rot->add_option("-o,--output", output, "CSV output path");

    // ---- correlations ----
    auto* cpl = app.add_subcommand("correlation-planar", "half-space correlation vs t/tau_D");
    auto* c2d = app.add_subcommand("correlation-2d", "planar 2D correlation vs t/tau_D");
    auto* cdr = app.add_subcommand("correlation-drift",
                                   "whole-space drift correlation vs t v^2/D");
    std::string corr_grid = "log:1e-4..1e2:200";
    for (auto* c : {cpl, c2d, cdr}) {
        c->add_option("--t-grid", corr_grid, "grid spec");
        c->add_option("-o,--output", output, "CSV output path");
    }

    // ---- md-run / md-sweep ----
    md::SimConfig cfg;
    std::string config_path;
    int threads = static_cast<int>(std::thread::hardware_concurrency());
    auto add_md_options = [&](CLI::App* c) {
        c->add_option("--config", config_path, "JSON config mirroring SimConfig fields");
        c->add_option("--lx", cfg.Lx);
        c->add_option("--ly", cfg.Ly);
        c->add_option("--lz", cfg.Lz);
        c->add_option("--n", cfg.N, "particle count (0: from density)");
        c->add_option("--density", cfg.density);
        c->add_option("--temperature", cfg.temperature);
        c->add_option("--dt", cfg.dt_step);
        c->add_option("--rcut", cfg.r_cut);
        c->add_option("--depth", cfg.nv_depth);
        c->add_option("--steps", cfg.n_steps);
        c->add_option("--thermo-steps", cfg.thermostat_steps);
        c->add_option("--stride", cfg.sample_stride);
        c->add_option("--seed", cfg.seed);
        c->add_option("--threads", threads);
        c->add_option("-o,--output", output, "output base path");
    };
    auto* mdr = app.add_subcommand("md-run", "single LJ-fluid run, dumps B(t)");
    add_md_options(mdr);
    mdr->add_option("--velocity", cfg.drift_v, "drift velocity (reduced)");

    auto* mds = app.add_subcommand("md-sweep", "velocity sweep: S(0) table + sqrt fit");
    add_md_options(mds);
    std::string sweep_v = "0,0.05,0.1,0.2,0.4,0.8";
    int sweep_runs = 20;
    mds->add_option("--velocities", sweep_v, "comma list of drift velocities");
    mds->add_option("--runs", sweep_runs, "runs per velocity");

    // ---- oracle-validate ----
    auto* val = app.add_subcommand("oracle-validate", "oracle-vs-analytic check suites");
    std::string suite = "spherical";
    val->add_option("--suite", suite, "spherical | planar | rotation | trivial");

    // ---- sensitivity ----
    auto* sen = app.add_subcommand("sensitivity", "velocity-uncertainty summary table");
    std::string fluid = "water";
    double sen_d_nm = 10.0, sen_v_mms = 1.0, sen_T = 1.0, sen_area = 1.0;
    sen->add_option("--fluid", fluid, "water | oil");
    sen->add_option("--depth-nm", sen_d_nm);
    sen->add_option("--velocity-mm-s", sen_v_mms);
    sen->add_option("--time-s", sen_T);
    sen->add_option("--area-um2", sen_area);
    sen->add_option("-o,--output", output, "CSV output path");

    // ---- reproduce-figure ----
    auto* fig = app.add_subcommand("reproduce-figure", "emit plot data for s4 | s5 | s6");
    std::string which = "s4";
    fig->add_option("figure", which, "s4 | s5 | s6")->required();
    fig->add_option("-o,--output", output, "CSV output path");

    CLI11_PARSE(app, argc, argv);

    Sidecar meta;
    meta.command = cmdline;

    try {
        if (sph->parsed()) {
            const auto grid = parse_grid(sph_grid);
            const auto vts = parse_grid(sph_vt);
            std::vector<std::string> header{"omega_over_omega_D[1]"};
            std::vector<std::vector<double>> cols{grid};
            for (double vt : vts) {
                header.push_back("gamma_dD[vtilde=" + fmt(vt) + "]");
                std::vector<double> col;
                for (double w : grid)
                    col.push_back(spectra::spherical_spectrum(w, vt, sph_m, 1.0, 1.0));
                cols.push_back(std::move(col));
            }
            write_csv(output, header, cols);
            meta.config = {{"omega_grid", sph_grid}, {"v_tilde", sph_vt}, {"m", sph_m}};
        } else if (pla->parsed()) {
            const auto grid = parse_grid(pla_grid);
            std::vector<double> vals, loss;
            for (double w : grid) {
                const auto r = spectra::planar_spectrum_detail(w, 1.0, 1.0, 1.0);
                vals.push_back(r.value);
                loss.push_back(r.precision_loss ? 1.0 : 0.0);
            }
            write_csv(output, {"omega_over_omega_D[1]", "s_kernel[n/(dD)]", "precision_loss[flag]"},
                      {grid, vals, loss});
            meta.config = {{"omega_grid", pla_grid}};
        } else if (rot->parsed()) {
            const auto grid = parse_grid(rot_grid);
            std::vector<double> vals;
            for (double wv : grid) vals.push_back(spectra::rotation_r2_spectrum_zero(wv, rot_m));
            write_csv(output, {"omega_v_over_omega_D[1]", "gamma0_dD[1]"}, {grid, vals});
            meta.config = {{"omega_v_grid", rot_grid}, {"m", rot_m}};
        } else if (cpl->parsed() || c2d->parsed() || cdr->parsed()) {
            const auto grid = parse_grid(corr_grid);
            std::vector<double> vals;
            std::string name;
            for (double t : grid) {
                if (cpl->parsed()) {
                    vals.push_back(corr::planar_correlation(t, 1.0, 1.0, 1.0));
                    name = "g_planar[n=d=D=1]";
                } else if (c2d->parsed()) {
                    vals.push_back(corr::planar_correlation_2d(t, 1.0, 1.0, 1.0));
                    name = "g_2d[n=d=D=1]";
                } else {
                    vals.push_back(corr::whole_space_drift_correlation(t, 1.0, 1.0, 1.0));
                    name = "g_drift[n=D=v=1]";
                }
            }
            write_csv(output, {"t[reduced]", name}, {grid, vals});
            meta.config = {{"t_grid", corr_grid}};
        } else if (mdr->parsed()) {
            if (!config_path.empty()) {
                std::ifstream f(config_path);
                if (!f) throw DomainError("cannot read config " + config_path);
                json j = json::parse(f);
                simconfig_from_json(j, cfg);
            }
            cfg.validate();
            const auto fs = md::run_single(cfg, 0);
            dump_field_series(output + ".bin", fs);
            std::vector<double> t(fs.samples.size());
            for (size_t i = 0; i < t.size(); ++i) t[i] = (i + 1.0) * fs.dt_sample;
            write_csv(output, {"t[reduced]", "B[reduced]"}, {t, fs.samples});
            meta.config = simconfig_to_json(cfg);
            meta.config["run_seed"] = fs.seed;
        } else if (mds->parsed()) {
            if (!config_path.empty()) {
                std::ifstream f(config_path);
                if (!f) throw DomainError("cannot read config " + config_path);
                json j = json::parse(f);
                simconfig_from_json(j, cfg);
            }
            cfg.n_runs = sweep_runs;
            cfg.validate();
            const auto vels = parse_grid(sweep_v);
            std::vector<double> s0s, errs;
            std::vector<EstimateWithError> s0norm(vels.size());
            for (double v : vels) {
                md::SimConfig c = cfg;
                c.drift_v = v;
                const auto runs = md::run_ensemble(c, threads);
                const auto sc = md::estimate_spectrum(runs);
                const auto s0 = s0_band(sc, 0.05);
                s0s.push_back(s0.value);
                errs.push_back(s0.std_err);
                std::cerr << "v=" << v << "  S(0)=" << s0.value << " +- " << s0.std_err << "\n";
            }
            for (size_t i = 0; i < vels.size(); ++i) {
                s0norm[i] = {s0s[i] / s0s[0],
                             std::sqrt(errs[i] * errs[i] + errs[0] * errs[0] * s0s[i] * s0s[i] /
                                                               (s0s[0] * s0s[0])) /
                                 s0s[0],
                             1};
            }
            const auto fit = md::fit_sqrt_model(vels, s0norm);
            std::vector<double> nv(vels.size()), ne(vels.size());
            for (size_t i = 0; i < vels.size(); ++i) {
                nv[i] = s0norm[i].value;
                ne[i] = s0norm[i].std_err;
            }
            write_csv(output, {"velocity[reduced]", "s0[reduced]", "s0_err", "s0_norm", "s0_norm_err"},
                      {vels, s0s, errs, nv, ne});
            meta.config = simconfig_to_json(cfg);
            meta.config["velocities"] = sweep_v;
            meta.config["fit"] = {{"b", fit.b},
                                  {"c", fit.c},
                                  {"b_ci95", fit.b_ci95},
                                  {"c_ci95", fit.c_ci95},
                                  {"r_squared", fit.r_squared}};
            std::cout << "fit: b=" << fit.b << " +- " << fit.b_ci95 << "  c=" << fit.c
                      << " +- " << fit.c_ci95 << "  R^2=" << fit.r_squared << "\n";
        } else if (val->parsed()) {
            return run_validation_suite(suite);
        } else if (sen->parsed()) {
            PhysicalParams p;
            p.gamma_e = constants::gamma_electron;
            p.gamma_n = constants::gamma_proton;
            if (fluid == "water") {
                p.D = 2.3e-9;
                p.n = 33e27;
                p.T2 = 100e-6;
            } else if (fluid == "oil") {
                p.D = 6.25e-13;
                p.n = 60e27;
                p.T2 = 100e-6;
            } else {
                throw DomainError("unknown fluid " + fluid);
            }
            p.d = sen_d_nm * 1e-9;
            p.v = sen_v_mms * 1e-3;
            sens::MeasurementBudget budget;
            budget.total_time_T = sen_T;
            budget.ensemble_area_A = sen_area * 1e-12;
            std::cout << "fluid=" << fluid << " d=" << sen_d_nm << "nm v=" << sen_v_mms
                      << "mm/s  (T=" << sen_T << "s, A=" << sen_area << "um^2)\n";
            std::cout << "  B_rms              = " << sens::b_rms(p) << " T\n";
            std::cout << "  Lorentzian dv/v    = "
                      << sens::lorentzian_velocity_uncertainty(p) / p.v << " (single NV, 1s)\n";
            std::cout << "  Lorentzian dv/v    = "
                      << sens::lorentzian_velocity_uncertainty(p, &budget) / p.v
                      << " (ensemble budget)\n";
            std::cout << "  intermediate dv    = " << sens::intermediate_uncertainty(p, &budget)
                      << " m/s\n";
            std::cout << "  low-frequency dv/v = " << sens::lowfreq_uncertainty(p, &budget) / p.v
                      << "\n";
            if (sens::correlation_method_in_range(p))
                std::cout << "  correlation dv/v   = "
                          << sens::correlation_method_uncertainty(p, &budget) << "\n";
            meta.config = {{"fluid", fluid}, {"d_nm", sen_d_nm}, {"v_mm_s", sen_v_mms}};
            return 0;
        } else if (fig->parsed()) {
            if (which == "s4") {
                const auto grid = parse_grid("log:1e-2..1e2:200");
                std::vector<double> vals;
                for (double w : grid) vals.push_back(spectra::gamma_spherical(w));
                write_csv(output, {"omega_over_omega_D[1]", "gamma_dD[1]"}, {grid, vals});
            } else if (which == "s5") {
                const auto grid = parse_grid("lin:0..25:251");
                std::vector<double> vals;
                for (double wv : grid) vals.push_back(spectra::rotation_r2_spectrum_zero(wv, 1));
                write_csv(output, {"omega_v_over_omega_D[1]", "gamma0_dD[1]"}, {grid, vals});
            } else if (which == "s6") {
                // normalized correlation decay, planar vs spherical geometry
                const auto grid = parse_grid("log:1e-2..1e1:40");
                std::vector<double> planar, spherical;
                const double g_pl0 = constants::pi * constants::pi / 2.0;
                // G_sph(t) = (1/pi) int Gamma(w) cos(wt) dw; G_sph(0) via the same route
                auto g_sph = [](double t) {
                    return oracle::quad_spectrum(
                               [](double w) { return spectra::gamma_spherical(w); }, t, 3e3,
                               1e-7, 2.0) /
                           (2.0 * constants::pi);
                };
                const double g_sph0 = 1.0 / 6.0; // (1/pi) int_0^inf Gamma = 1/6
                for (double t : grid) {
                    planar.push_back(corr::planar_correlation(t, 1, 1, 1) / g_pl0);
                    spherical.push_back(g_sph(t) / g_sph0);
                }
                write_csv(output, {"t_over_tau_D[1]", "g_planar_norm[1]", "g_spherical_norm[1]"},
                          {grid, planar, spherical});
            } else {
                throw DomainError("unknown figure " + which);
            }
            meta.config = {{"figure", which}};
        }
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    meta.write(output);
    return 0;
}

namespace {

struct Check {
    std::string name;
    double got, want, tol; // relative tolerance
    bool pass() const { return std::abs(got - want) <= tol * std::abs(want); }
};

int report(const std::vector<Check>& checks) {
    bool all = true;
    for (const auto& c : checks) {
        const bool ok = c.pass();
        all &= ok;
        std::printf("%-52s got %.8g want %.8g (tol %.1g)  %s\n", c.name.c_str(), c.got, c.want,
                    c.tol, ok ? "PASS" : "FAIL");
    }
    return all ? 0 : 3;
}

int run_validation_suite(const std::string& suite) {
    std::vector<Check> checks;
    if (suite == "spherical") {
        checks.push_back({"Gamma(0) dD = 4/27", spectra::gamma_spherical(0.0), 4.0 / 27.0, 1e-12});
        checks.push_back({"quad oracle at omega_bar=1", oracle::quad_spherical_gamma(1.0, 1e-6),
                          spectra::gamma_spherical(1.0), 1e-4});
        checks.push_back({"quad oracle at omega_bar=0.01",
                          oracle::quad_spherical_gamma(0.01, 1e-6),
                          spectra::gamma_spherical(0.01), 1e-4});
        checks.push_back({"high-frequency tail ~ 3/w^2 (w=2000)",
                          spectra::gamma_spherical(2000.0) * 2000.0 * 2000.0, 3.0, 0.05});
    } else if (suite == "planar") {
        for (double w : {0.05, 1.0, 4.0}) {
            const double closed = spectra::planar_spectrum(w, 1, 1, 1);
            const double quad = oracle::quad_spectrum(
                [](double t) { return corr::planar_correlation(t, 1, 1, 1); }, w, 2e4, 1e-6, 1.5);
            checks.push_back({"FT consistency at omega_bar=" + fmt(w), closed, quad, 1e-2});
        }
        checks.push_back({"short-time correlation -> n pi^2/(2 d^3)",
                          corr::planar_correlation(1e-4, 1, 1, 1),
                          constants::pi * constants::pi / 2.0, 1e-3});
        const auto mc = oracle::mc_correlation(oracle::WalkerGeometry::HalfSpace,
                                               {1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0},
                                               {1.0}, 200000, 50.0, 12345);
        const double want = corr::planar_correlation(1.0, 1, 1, 1);
        checks.push_back({"MC walker oracle at tau_D (3 sigma window)",
                          mc.estimates[0].value, want,
                          3.0 * mc.estimates[0].std_err / std::abs(want)});
    } else if (suite == "rotation") {
        checks.push_back({"Gamma_rot(0) = 4/27", spectra::rotation_r2_spectrum_zero(0.0, 1),
                          4.0 / 27.0, 1e-14});
        const cplx quad = oracle::quad_rotation_r2(1.0, 2, 1e-7);
        checks.push_back({"D31 quadrature at beta'=1", spectra::rotation_r2_spectrum_zero(1.0, 1),
                          quad.real(), 1e-5});
    } else if (suite == "trivial") {
        std::cerr << "usage error: empty grid\n";
        return 1;
    } else {
        std::cerr << "unknown suite " << suite << "\n";
        return 1;
    }
    return report(checks);
}

} // namespace
