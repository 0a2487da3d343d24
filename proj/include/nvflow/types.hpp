#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace nvflow {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;

/// Thrown when an argument lies outside a function's mathematical domain.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Thrown when an intermediate would overflow double precision.
class OverflowGuard : public std::range_error {
public:
    explicit OverflowGuard(const std::string& what) : std::range_error(what) {}
};

/// Thrown when a series hits its term cap before reaching tolerance.
class SeriesDiverged : public std::runtime_error {
public:
    explicit SeriesDiverged(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when adaptive refinement stalls above the requested tolerance.
class ConvergenceFailure : public std::runtime_error {
public:
    explicit ConvergenceFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Truncation/series controls shared by the special-function kernels.
struct SeriesControl {
    double rel_tol = 1e-12;
    int max_terms = 500;
};

/// Sensor and fluid parameters; the single source of dimensional truth (SI units).
struct PhysicalParams {
    double d;        ///< NV depth below the diamond surface [m]
    double D;        ///< self-diffusion coefficient [m^2/s]
    double v = 0.0;  ///< mean drift speed [m/s]
    double n;        ///< nuclear spin number density [1/m^3]
    double gamma_e;  ///< electron gyromagnetic ratio [rad/(s T)]
    double gamma_n;  ///< nuclear gyromagnetic ratio [rad/(s T)]
    double T2 = 0.0; ///< NV coherence time [s]; 0 means unspecified

    double omega_D() const { return D / (d * d); }
    double omega_v() const { return v / d; }
    double tau_D() const { return d * d / D; }
    double v_tilde() const { return omega_v() / omega_D(); }

    void validate() const {
        if (!(d > 0.0)) throw DomainError("PhysicalParams: d must be > 0");
        if (!(D > 0.0)) throw DomainError("PhysicalParams: D must be > 0");
        if (v < 0.0) throw DomainError("PhysicalParams: v must be >= 0");
        if (!(n > 0.0)) throw DomainError("PhysicalParams: n must be > 0");
        if (!(gamma_e > 0.0) || !(gamma_n > 0.0))
            throw DomainError("PhysicalParams: gyromagnetic ratios must be > 0");
    }
};

/// Frequencies rescaled by the diffusion scale omega_D = D/d^2.
struct DimensionlessFreq {
    double omega_bar;   ///< omega / omega_D
    double omega_v_bar; ///< omega_v / omega_D (= v~)
};

enum class CurveUnits { Dimensionless, Physical };
enum class Provenance { Analytic, Asymptotic, Md, Oracle };

/// Sampled spectrum with units and provenance metadata.
struct SpectrumCurve {
    Eigen::ArrayXd omegas;
    Eigen::ArrayXd values;
    Eigen::ArrayXd std_errs; ///< empty unless stochastic
    CurveUnits units = CurveUnits::Dimensionless;
    Provenance provenance = Provenance::Analytic;
    PhysicalParams params{};
};

enum class CorrelationGeometry { Planar3D, Planar2D, WholeSpaceDrift };

/// Sampled time correlation function.
struct CorrelationCurve {
    Eigen::ArrayXd times;
    Eigen::ArrayXd values;
    int m_index = 0;
    CorrelationGeometry geometry = CorrelationGeometry::Planar3D;
    PhysicalParams params{};
};

/// A stochastic estimate with its standard error.
struct EstimateWithError {
    double value = 0.0;
    double std_err = 0.0;
    long n_samples = 0;
};

} // namespace nvflow
