#include "nvflow/sensitivity.hpp"
#include "nvflow/constants.hpp"
#include "nvflow/quadrature.hpp"

#include <cmath>

namespace nvflow::sens {

namespace {

double apply_budget(double x, const MeasurementBudget* budget) {
    if (!budget) return x;
    budget->validate();
    return x * budget->collection_penalty / (budget->gain() * std::sqrt(budget->total_time_T));
}

double gamma_e_b_rms(const PhysicalParams& p) { return p.gamma_e * b_rms(p); }

} // namespace

double b_rms(const PhysicalParams& params) {
    params.validate();
    return std::sqrt(constants::dipole_coupling_sq(params.gamma_n) * params.n /
                     std::pow(params.d, 3));
}

double lorentzian_spectrum(double omega, double sigma_width, double s0) {
    if (!(sigma_width > 0.0)) throw DomainError("lorentzian_spectrum: sigma must be > 0");
    return sigma_width * sigma_width * s0 / (omega * omega + sigma_width * sigma_width);
}

double lorentzian_s0(const PhysicalParams& params) {
    const double sigma = std::hypot(params.omega_D(), params.omega_v());
    const double gb = gamma_e_b_rms(params);
    return gb * gb / sigma;
}

double lorentzian_velocity_uncertainty(const PhysicalParams& params,
                                       const MeasurementBudget* budget) {
    if (!(params.v > 0.0))
        throw DomainError("lorentzian_velocity_uncertainty: v must be > 0");
    const double dvt = (1.0 / params.v_tilde()) /
                       (gamma_e_b_rms(params) * std::sqrt(params.tau_D()));
    const double dv = dvt * params.d / params.tau_D();
    return apply_budget(dv, budget);
}

double intermediate_uncertainty(const PhysicalParams& params,
                                const MeasurementBudget* budget) {
    const double dvt = 1.0 / (std::sqrt(params.tau_D()) * gamma_e_b_rms(params));
    return apply_budget(dvt * params.d / params.tau_D(), budget);
}

double lowfreq_uncertainty(const PhysicalParams& params, const MeasurementBudget* budget) {
    if (!(params.v > 0.0)) throw DomainError("lowfreq_uncertainty: v must be > 0");
    const double dvt = 2.0 / (gamma_e_b_rms(params) * std::sqrt(params.tau_D())) *
                       std::sqrt(params.v_tilde());
    return apply_budget(dvt * params.d / params.tau_D(), budget);
}

double correlation_method_uncertainty(const PhysicalParams& params,
                                      const MeasurementBudget* budget) {
    if (!(params.T2 > 0.0))
        throw DomainError("correlation_method_uncertainty: T2 must be set");
    const double gb = gamma_e_b_rms(params);
    const double single = 1.0 / (3.0 * params.T2 * params.T2 * gb * gb);
    return apply_budget(single, budget);
}

bool lorentzian_in_range(const PhysicalParams& p) { return p.omega_v() < 0.1 * p.omega_D(); }

bool lowfreq_in_range(const PhysicalParams& p) {
    return p.T2 > 0.0 && p.omega_v() > 0.0 && p.T2 * p.omega_v() > 10.0;
}

bool correlation_method_in_range(const PhysicalParams& p) {
    if (!(p.T2 > 0.0) || !(p.v > 0.0)) return false;
    return p.T2 < p.tau_D() && p.T2 < p.d / p.v;
}

double dephasing_decay(double s_zero, double T) {
    if (s_zero < 0.0 || T < 0.0) throw DomainError("dephasing_decay: s0, T must be >= 0");
    return std::exp(-0.5 * s_zero * T);
}

double ensemble_depth_average(const std::function<double(double, double)>& spectrum_fn,
                              double d1, double d2, double omega) {
    if (!(d1 > 0.0) || !(d2 > d1)) throw DomainError("ensemble_depth_average: need 0 < d1 < d2");
    quadrature::QuadOptions opt;
    opt.rel_tol = 1e-9;
    opt.abs_tol = 0.0;
    const double total = quadrature::integrate(
        [&](double depth) { return spectrum_fn(omega, depth); }, d1, d2, opt);
    return total / (d2 - d1);
}

double depth_ensemble_uncertainty_ratio(const PhysicalParams& params, double d1, double d2) {
    params.validate();
    if (!(params.v > 0.0)) throw DomainError("depth_ensemble_uncertainty_ratio: v must be > 0");

    auto s0_at = [&](double v, double depth) {
        PhysicalParams q = params;
        q.d = depth;
        q.v = v;
        return lorentzian_s0(q);
    };
    auto uncertainty = [&](const std::function<double(double)>& s_of_v) {
        const double h = 1e-6 * params.v;
        const double ds = (s_of_v(params.v + h) - s_of_v(params.v - h)) / (2.0 * h);
        return std::sqrt(s_of_v(params.v)) / std::abs(ds);
    };

    const double dv_ens = uncertainty([&](double v) {
        return ensemble_depth_average(
            [&](double, double depth) { return s0_at(v, depth); }, d1, d2, 0.0);
    });
    const double dv_fixed = uncertainty([&](double v) { return s0_at(v, params.d); });
    return dv_ens / dv_fixed;
}

} // namespace nvflow::sens
