#pragma once

#include "nvflow/types.hpp"

#include <cstdint>
#include <vector>

namespace nvflow::md {

class ThermalizationFailed : public std::runtime_error {
public:
    explicit ThermalizationFailed(const std::string& what) : std::runtime_error(what) {}
};

class BlowUp : public std::runtime_error {
public:
    explicit BlowUp(const std::string& what) : std::runtime_error(what) {}
};

class SingularFit : public std::runtime_error {
public:
    explicit SingularFit(const std::string& what) : std::runtime_error(what) {}
};

class ShapeMismatch : public std::runtime_error {
public:
    explicit ShapeMismatch(const std::string& what) : std::runtime_error(what) {}
};

/// Reduced-unit Lennard-Jones fluid run specification. Lengths in sigma,
/// energies in epsilon, times in sqrt(m sigma^2 / epsilon), m = 1.
struct SimConfig {
    double Lx = 40.0, Ly = 12.0, Lz = 10.8;
    long N = 0;            ///< 0: fill from density
    double density = 0.79; ///< used when N == 0
    double epsilon = 1.0;
    double sigma = 1.0;
    double temperature = 1.0;
    double dt_step = 0.00125;
    double r_cut = 2.5;
    double nv_depth = 5.0; ///< NV sits nv_depth below the box, centered in xy
    double drift_v = 0.0;  ///< added along x after thermalization
    long n_steps = 200000;
    long thermostat_steps = 10000;
    std::uint64_t seed = 1;
    int n_runs = 1;
    long sample_stride = 1;

    long particle_count() const;
    void validate() const;
};

struct ParticleState {
    Vec3 pos;
    Vec3 vel;
    int spin; ///< +-1, passive label
};

/// Recorded NV-projected field of one run.
struct FieldSeries {
    std::vector<double> samples;
    double dt_sample = 0.0;
    int run_id = 0;
    std::uint64_t seed = 0;
};

/// One LJ-fluid realization: deterministic given its seed. Thermalizes with
/// a BAOAB Langevin thermostat, then integrates NVE with velocity Verlet;
/// z walls reflect, x/y wrap periodically and flip spins with probability 1/2.
class Simulation {
public:
    Simulation(const SimConfig& cfg, std::uint64_t seed);

    void init_thermal();
    void remove_com_velocity();
    void add_drift(double v);
    void step_velocity_verlet();
    void step_langevin(double friction);

    double compute_field() const;
    double kinetic_temperature() const;
    double total_energy() const; ///< KE + shift-corrected LJ potential

    FieldSeries run_production(int run_id);

    const std::vector<ParticleState>& particles() const { return parts_; }
    std::vector<ParticleState>& particles() { return parts_; }
    const SimConfig& config() const { return cfg_; }

    /// Sum of m vx over all particles (momentum bookkeeping for tests).
    Vec3 total_momentum() const;

private:
    void build_cells();
    void build_neighbors();
    void compute_forces();
    void apply_boundaries(ParticleState& p);

    SimConfig cfg_;
    std::vector<ParticleState> parts_;
    std::vector<Vec3> forces_;
    std::vector<Vec3> ref_pos_; ///< positions at last neighbor build
    std::vector<std::vector<int>> neighbors_;
    double potential_ = 0.0;
    double skin_ = 0.4;
    std::uint64_t thermo_state_, flip_state_, init_state_;
    bool forces_fresh_ = false;
};

/// Thermalize + drift + production for one run id (seed derived from config).
FieldSeries run_single(const SimConfig& cfg, int run_id);

/// All runs of the config, fanned out across worker threads.
std::vector<FieldSeries> run_ensemble(const SimConfig& cfg, int n_threads);

/// Ensemble-averaged one-sided periodogram, normalized so that
/// sum S(w_k) dw = mean power. Runs are trimmed to a power-of-two length.
SpectrumCurve estimate_spectrum(const std::vector<FieldSeries>& runs);

struct SqrtFit {
    double b = 0.0, c = 0.0;
    double b_ci95 = 0.0, c_ci95 = 0.0;
    double r_squared = 0.0;
};

/// Weighted least squares of s0(v)/s0(0) = 1 + b sqrt(v) + c v.
SqrtFit fit_sqrt_model(const std::vector<double>& velocities,
                       const std::vector<EstimateWithError>& s0_values);

} // namespace nvflow::md
