#pragma once

#include "nvflow/types.hpp"

#include <cmath>
#include <functional>

namespace nvflow::sens {

/// Measurement-resource model: total averaging time, the order-of-magnitude
/// contrast/collection penalty and the NV-ensemble areal gain.
struct MeasurementBudget {
    double total_time_T = 1.0;       ///< [s]
    double collection_penalty = 10.0;
    double ensemble_area_A = 1e-12;  ///< [m^2] (1 um^2)
    double nv_areal_gain = 50.0;     ///< per sqrt(um^2)

    void validate() const {
        if (!(total_time_T > 0.0) || !(collection_penalty > 0.0) ||
            !(ensemble_area_A > 0.0) || !(nv_areal_gain > 0.0))
            throw DomainError("MeasurementBudget: all fields must be > 0");
    }
    double gain() const { return nv_areal_gain * std::sqrt(ensemble_area_A / 1e-12); }
};

/// Root-mean-square dipolar field of the statistically polarized bath:
/// B_rms^2 = n (mu0 hbar gamma_n / 4 pi)^2 / d^3.
double b_rms(const PhysicalParams& params);

/// Lorentzian model S(w) = sigma^2 S(0) / (w^2 + sigma^2).
double lorentzian_spectrum(double omega, double sigma_width, double s0);

/// S(0) of the Lorentzian model with width sigma^2 = w_D^2 + w_v^2.
double lorentzian_s0(const PhysicalParams& params);

/// Velocity uncertainty of the Lorentzian amplitude estimator (w_v << w_D):
/// dv~ = (1/v~) / (gamma_e B_rms sqrt(tau_D T)). Returns dv [m/s]; a null
/// budget means a single NV, unit time and no collection penalty.
double lorentzian_velocity_uncertainty(const PhysicalParams& params,
                                       const MeasurementBudget* budget = nullptr);

/// Intermediate-regime (w ~ w_D) uncertainty dv~ = 1/(sqrt(T tau_D) gamma_e B_rms).
double intermediate_uncertainty(const PhysicalParams& params,
                                const MeasurementBudget* budget = nullptr);

/// Low-frequency regime (w <~ w_v, T2 >> 1/w_v):
/// dv~ = (2/(gamma_e B_rms sqrt(tau_D))) sqrt(v~/T). Returns dv [m/s].
double lowfreq_uncertainty(const PhysicalParams& params,
                           const MeasurementBudget* budget = nullptr);

/// Correlation-window method for viscous fluids (T2 < tau_D, tau_v):
/// single-shot dv/v = (1/3)/(T2^2 gamma_e^2 B_rms^2); budget-adjusted.
double correlation_method_uncertainty(const PhysicalParams& params,
                                      const MeasurementBudget* budget = nullptr);

bool lorentzian_in_range(const PhysicalParams& params);      // w_v << w_D
bool lowfreq_in_range(const PhysicalParams& params);         // T2 >> 1/w_v
bool correlation_method_in_range(const PhysicalParams& params);

/// Free-induction observable Tr(rho sigma_x) = exp(-S(0) T / 2).
double dephasing_decay(double s_zero, double T);

/// Uniform depth average <S(w)> = (1/(d2-d1)) int_{d1}^{d2} S(w, delta) d delta.
double ensemble_depth_average(const std::function<double(double, double)>& spectrum_fn,
                              double d1, double d2, double omega);

/// Velocity uncertainty recomputed from the depth-averaged Lorentzian S(0),
/// relative to the fixed-depth value at params.d (same estimator both sides).
double depth_ensemble_uncertainty_ratio(const PhysicalParams& params, double d1, double d2);

} // namespace nvflow::sens
