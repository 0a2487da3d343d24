#include "nvflow/mdsim.hpp"
#include "nvflow/constants.hpp"
#include "nvflow/fft.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace nvflow::md {

namespace {

std::uint64_t splitmix(std::uint64_t& s) {
    s += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double uniform01(std::uint64_t& s) {
    return (static_cast<double>(splitmix(s) >> 11) + 0.5) * 0x1.0p-53;
}

double normal01(std::uint64_t& s) {
    const double u1 = uniform01(s), u2 = uniform01(s);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * constants::pi * u2);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed ^ (0xd1342543de82ef95ULL * (stream + 1));
    splitmix(s);
    return s;
}

constexpr double kVelocityGuard = 1e3;

} // namespace

long SimConfig::particle_count() const {
    if (N > 0) return N;
    return std::lround(density * Lx * Ly * Lz);
}

void SimConfig::validate() const {
    if (!(Lx > 0.0) || !(Ly > 0.0) || !(Lz > 0.0))
        throw DomainError("SimConfig: box lengths must be > 0");
    if (!(dt_step > 0.0)) throw DomainError("SimConfig: dt_step must be > 0");
    if (!(r_cut > 0.0) || r_cut > 0.5 * std::min(Lx, Ly))
        throw DomainError("SimConfig: need 0 < r_cut <= min(Lx,Ly)/2");
    if (!(nv_depth > 0.0)) throw DomainError("SimConfig: nv_depth must be > 0");
    if (particle_count() < 2) throw DomainError("SimConfig: need at least 2 particles");
    if (n_steps < 1 || thermostat_steps < 0 || n_runs < 1 || sample_stride < 1)
        throw DomainError("SimConfig: invalid step counts");
}

Simulation::Simulation(const SimConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
    cfg_.validate();
    init_state_ = mix_seed(seed, 0);
    thermo_state_ = mix_seed(seed, 1);
    flip_state_ = mix_seed(seed, 2);

    const long n = cfg_.particle_count();
    parts_.resize(n);
    forces_.assign(n, Vec3::Zero());

    // simple-cubic fill; spacing stays above 0.9 sigma at the target density
    const double a0 = std::cbrt(cfg_.Lx * cfg_.Ly * cfg_.Lz / static_cast<double>(n));
    long nx = std::max<long>(1, static_cast<long>(std::ceil(cfg_.Lx / a0)));
    long ny = std::max<long>(1, static_cast<long>(std::ceil(cfg_.Ly / a0)));
    long nz = std::max<long>(1, static_cast<long>(std::ceil(cfg_.Lz / a0)));
    while (nx * ny * nz < n) ++nx;
    const double ax = cfg_.Lx / nx, ay = cfg_.Ly / ny, az = cfg_.Lz / nz;
    if (std::min({ax, ay, az}) <= 0.9)
        throw DomainError("Simulation: lattice spacing below 0.9 sigma; density too high");
    long idx = 0;
    for (long iz = 0; iz < nz && idx < n; ++iz)
        for (long iy = 0; iy < ny && idx < n; ++iy)
            for (long ix = 0; ix < nx && idx < n; ++ix, ++idx)
                parts_[idx].pos = Vec3((ix + 0.5) * ax, (iy + 0.5) * ay, (iz + 0.5) * az);

    const double vth = std::sqrt(cfg_.temperature);
    for (auto& p : parts_) {
        p.vel = vth * Vec3(normal01(init_state_), normal01(init_state_), normal01(init_state_));
        p.spin = (splitmix(init_state_) & 1ULL) ? 1 : -1;
    }
    build_neighbors();
    compute_forces();
}

void Simulation::build_cells() {} // cells are rebuilt inside build_neighbors

void Simulation::build_neighbors() {
    const double reach = cfg_.r_cut + skin_;
    const long n = static_cast<long>(parts_.size());
    const int ncx = std::max(1, static_cast<int>(cfg_.Lx / reach));
    const int ncy = std::max(1, static_cast<int>(cfg_.Ly / reach));
    const int ncz = std::max(1, static_cast<int>(cfg_.Lz / reach));
    const double cx = cfg_.Lx / ncx, cy = cfg_.Ly / ncy, cz = cfg_.Lz / ncz;

    std::vector<std::vector<int>> cells(static_cast<size_t>(ncx) * ncy * ncz);
    auto cell_of = [&](const Vec3& r) {
        int ix = std::min(ncx - 1, std::max(0, static_cast<int>(r.x() / cx)));
        int iy = std::min(ncy - 1, std::max(0, static_cast<int>(r.y() / cy)));
        int iz = std::min(ncz - 1, std::max(0, static_cast<int>(r.z() / cz)));
        return (iz * ncy + iy) * ncx + ix;
    };
    for (long i = 0; i < n; ++i) cells[cell_of(parts_[i].pos)].push_back(static_cast<int>(i));

    neighbors_.assign(n, {});
    const double reach2 = reach * reach;
    const double hx = 0.5 * cfg_.Lx, hy = 0.5 * cfg_.Ly;
    for (int iz = 0; iz < ncz; ++iz)
        for (int iy = 0; iy < ncy; ++iy)
            for (int ix = 0; ix < ncx; ++ix) {
                const auto& base = cells[(static_cast<size_t>(iz) * ncy + iy) * ncx + ix];
                for (int dz = -1; dz <= 1; ++dz) {
                    const int jz = iz + dz;
                    if (jz < 0 || jz >= ncz) continue; // z walls: no wrap
                    for (int dy = -1; dy <= 1; ++dy) {
                        const int jy = (iy + dy + ncy) % ncy;
                        for (int dx = -1; dx <= 1; ++dx) {
                            const int jx = (ix + dx + ncx) % ncx;
                            const auto& other =
                                cells[(static_cast<size_t>(jz) * ncy + jy) * ncx + jx];
                            for (int i : base)
                                for (int j : other) {
                                    if (j <= i) continue;
                                    Vec3 dr = parts_[i].pos - parts_[j].pos;
                                    if (dr.x() > hx) dr.x() -= cfg_.Lx;
                                    if (dr.x() < -hx) dr.x() += cfg_.Lx;
                                    if (dr.y() > hy) dr.y() -= cfg_.Ly;
                                    if (dr.y() < -hy) dr.y() += cfg_.Ly;
                                    if (dr.squaredNorm() < reach2)
                                        neighbors_[i].push_back(j);
                                }
                        }
                    }
                }
            }
    ref_pos_.resize(n);
    for (long i = 0; i < n; ++i) ref_pos_[i] = parts_[i].pos;
}

void Simulation::compute_forces() {
    const long n = static_cast<long>(parts_.size());
    // rebuild when anything moved more than half the skin
    const double lim2 = 0.25 * skin_ * skin_;
    for (long i = 0; i < n; ++i) {
        Vec3 dr = parts_[i].pos - ref_pos_[i];
        // periodic wrap can jump a particle across the box
        if (std::abs(dr.x()) > 0.5 * cfg_.Lx) dr.x() -= std::copysign(cfg_.Lx, dr.x());
        if (std::abs(dr.y()) > 0.5 * cfg_.Ly) dr.y() -= std::copysign(cfg_.Ly, dr.y());
        if (dr.squaredNorm() > lim2) {
            build_neighbors();
            break;
        }
    }
    for (auto& f : forces_) f.setZero();
    potential_ = 0.0;
    const double rc2 = cfg_.r_cut * cfg_.r_cut;
    const double hx = 0.5 * cfg_.Lx, hy = 0.5 * cfg_.Ly;
    const double eps4 = 4.0 * cfg_.epsilon;
    const double s2 = cfg_.sigma * cfg_.sigma;
    const double rc6 = std::pow(s2 / rc2, 3);
    const double u_shift = eps4 * (rc6 * rc6 - rc6);
    for (long i = 0; i < n; ++i) {
        const Vec3 pi = parts_[i].pos;
        Vec3 fi = Vec3::Zero();
        for (int j : neighbors_[i]) {
            Vec3 dr = pi - parts_[j].pos;
            if (dr.x() > hx) dr.x() -= cfg_.Lx;
            else if (dr.x() < -hx) dr.x() += cfg_.Lx;
            if (dr.y() > hy) dr.y() -= cfg_.Ly;
            else if (dr.y() < -hy) dr.y() += cfg_.Ly;
            const double r2 = dr.squaredNorm();
            if (r2 >= rc2) continue;
            const double inv2 = s2 / r2;
            const double inv6 = inv2 * inv2 * inv2;
            const double fmag = eps4 * (12.0 * inv6 * inv6 - 6.0 * inv6) / r2;
            fi += fmag * dr;
            forces_[j] -= fmag * dr;
            potential_ += eps4 * (inv6 * inv6 - inv6) - u_shift;
        }
        forces_[i] += fi;
    }
    forces_fresh_ = true;
}

void Simulation::apply_boundaries(ParticleState& p) {
    // z: specular walls at 0 and Lz
    while (p.pos.z() < 0.0 || p.pos.z() > cfg_.Lz) {
        if (p.pos.z() < 0.0) {
            p.pos.z() = -p.pos.z();
            p.vel.z() = -p.vel.z();
        } else {
            p.pos.z() = 2.0 * cfg_.Lz - p.pos.z();
            p.vel.z() = -p.vel.z();
        }
    }
    // x, y: periodic wrap; each crossing flips the spin with probability 1/2
    while (p.pos.x() < 0.0 || p.pos.x() >= cfg_.Lx) {
        p.pos.x() -= std::copysign(cfg_.Lx, p.pos.x() < 0.0 ? -1.0 : 1.0);
        if (uniform01(flip_state_) < 0.5) p.spin = -p.spin;
    }
    while (p.pos.y() < 0.0 || p.pos.y() >= cfg_.Ly) {
        p.pos.y() -= std::copysign(cfg_.Ly, p.pos.y() < 0.0 ? -1.0 : 1.0);
        if (uniform01(flip_state_) < 0.5) p.spin = -p.spin;
    }
}

void Simulation::step_velocity_verlet() {
    if (!forces_fresh_) compute_forces();
    const double h = 0.5 * cfg_.dt_step;
    const long n = static_cast<long>(parts_.size());
    for (long i = 0; i < n; ++i) {
        parts_[i].vel += h * forces_[i];
        parts_[i].pos += cfg_.dt_step * parts_[i].vel;
        apply_boundaries(parts_[i]);
    }
    compute_forces();
    for (long i = 0; i < n; ++i) {
        parts_[i].vel += h * forces_[i];
        if (parts_[i].vel.cwiseAbs().maxCoeff() > kVelocityGuard)
            throw BlowUp("step_velocity_verlet: velocity guard tripped");
    }
}

void Simulation::step_langevin(double friction) {
    if (!forces_fresh_) compute_forces();
    const double h = 0.5 * cfg_.dt_step;
    const double c1 = std::exp(-friction * cfg_.dt_step);
    const double c2 = std::sqrt(cfg_.temperature * (1.0 - c1 * c1));
    const long n = static_cast<long>(parts_.size());
    for (long i = 0; i < n; ++i) {
        parts_[i].vel += h * forces_[i];
        parts_[i].pos += h * parts_[i].vel;
        parts_[i].vel = c1 * parts_[i].vel +
                        c2 * Vec3(normal01(thermo_state_), normal01(thermo_state_),
                                  normal01(thermo_state_));
        parts_[i].pos += h * parts_[i].vel;
        apply_boundaries(parts_[i]);
    }
    compute_forces();
    for (long i = 0; i < n; ++i) parts_[i].vel += h * forces_[i];
}

void Simulation::init_thermal() {
    double t_acc = 0.0;
    long t_cnt = 0;
    const long avg_from = cfg_.thermostat_steps * 4 / 5;
    for (long s = 0; s < cfg_.thermostat_steps; ++s) {
        step_langevin(1.0);
        if (s >= avg_from) {
            t_acc += kinetic_temperature();
            ++t_cnt;
        }
    }
    if (t_cnt > 0) {
        const double t_mean = t_acc / t_cnt;
        if (std::abs(t_mean - cfg_.temperature) > 0.05 * cfg_.temperature)
            throw ThermalizationFailed("init_thermal: mean kinetic temperature off by > 5%");
    }
}

void Simulation::remove_com_velocity() {
    Vec3 mean = Vec3::Zero();
    for (const auto& p : parts_) mean += p.vel;
    mean /= static_cast<double>(parts_.size());
    for (auto& p : parts_) p.vel -= mean;
}

void Simulation::add_drift(double v) {
    for (auto& p : parts_) p.vel.x() += v;
}

double Simulation::compute_field() const {
    const Vec3 nv(0.5 * cfg_.Lx, 0.5 * cfg_.Ly, -cfg_.nv_depth);
    double b = 0.0;
    for (const auto& p : parts_) {
        const Vec3 r = p.pos - nv;
        const double r2 = r.squaredNorm();
        const double c2 = r.z() * r.z() / r2;
        b += (3.0 * c2 - 1.0) / (r2 * std::sqrt(r2)) * p.spin;
    }
    return b;
}

double Simulation::kinetic_temperature() const {
    double ke2 = 0.0;
    for (const auto& p : parts_) ke2 += p.vel.squaredNorm();
    return ke2 / (3.0 * static_cast<double>(parts_.size()));
}

double Simulation::total_energy() const {
    double ke = 0.0;
    for (const auto& p : parts_) ke += 0.5 * p.vel.squaredNorm();
    return ke + potential_;
}

Vec3 Simulation::total_momentum() const {
    Vec3 p = Vec3::Zero();
    for (const auto& q : parts_) p += q.vel;
    return p;
}

FieldSeries Simulation::run_production(int run_id) {
    FieldSeries out;
    out.dt_sample = cfg_.dt_step * cfg_.sample_stride;
    out.run_id = run_id;
    out.samples.reserve(cfg_.n_steps / cfg_.sample_stride + 1);
    for (long s = 0; s < cfg_.n_steps; ++s) {
        step_velocity_verlet();
        if ((s + 1) % cfg_.sample_stride == 0) out.samples.push_back(compute_field());
    }
    return out;
}

FieldSeries run_single(const SimConfig& cfg, int run_id) {
    const std::uint64_t seed = mix_seed(cfg.seed, 1000003ULL * (run_id + 1));
    Simulation sim(cfg, seed);
    sim.init_thermal();
    sim.remove_com_velocity();
    sim.add_drift(cfg.drift_v);
    FieldSeries fs = sim.run_production(run_id);
    fs.seed = seed;
    return fs;
}

std::vector<FieldSeries> run_ensemble(const SimConfig& cfg, int n_threads) {
    std::vector<FieldSeries> out(cfg.n_runs);
    if (n_threads < 1) n_threads = 1;
    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            const int id = next.fetch_add(1);
            if (id >= cfg.n_runs) return;
            out[id] = run_single(cfg, id);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min(n_threads, cfg.n_runs); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return out;
}

SpectrumCurve estimate_spectrum(const std::vector<FieldSeries>& runs) {
    if (runs.empty()) throw ShapeMismatch("estimate_spectrum: no runs");
    const double dt = runs.front().dt_sample;
    size_t min_len = runs.front().samples.size();
    for (const auto& r : runs) {
        if (r.dt_sample != dt) throw ShapeMismatch("estimate_spectrum: dt_sample differs");
        if (r.samples.size() != runs.front().samples.size())
            throw ShapeMismatch("estimate_spectrum: run lengths differ");
        min_len = std::min(min_len, r.samples.size());
    }
    const size_t m = fft::floor_pow2(min_len);
    const size_t nb = m / 2 + 1;
    Eigen::ArrayXd mean = Eigen::ArrayXd::Zero(nb);
    Eigen::ArrayXd msq = Eigen::ArrayXd::Zero(nb);
    std::vector<cplx> buf(m);
    for (const auto& r : runs) {
        const size_t off = r.samples.size() - m; // keep the latest samples
        for (size_t j = 0; j < m; ++j) buf[j] = cplx(r.samples[off + j], 0.0);
        fft::transform(buf);
        Eigen::ArrayXd s(nb);
        const double norm = dt / (2.0 * constants::pi * static_cast<double>(m));
        for (size_t k = 0; k < nb; ++k) {
            double p = std::norm(buf[k]) * norm;
            if (k > 0 && k < m - k) p += std::norm(buf[m - k]) * norm; // fold negatives
            s[static_cast<Eigen::Index>(k)] = p;
        }
        mean += s;
        msq += s * s;
    }
    const double nr = static_cast<double>(runs.size());
    mean /= nr;
    msq /= nr;

    SpectrumCurve curve;
    curve.omegas = Eigen::ArrayXd::LinSpaced(static_cast<Eigen::Index>(nb), 0.0,
                                             2.0 * constants::pi * static_cast<double>(nb - 1) /
                                                 (static_cast<double>(m) * dt));
    curve.values = mean;
    curve.std_errs = ((msq - mean * mean).max(0.0) / std::max(1.0, nr - 1.0)).sqrt();
    curve.units = CurveUnits::Dimensionless;
    curve.provenance = Provenance::Md;
    return curve;
}

SqrtFit fit_sqrt_model(const std::vector<double>& velocities,
                       const std::vector<EstimateWithError>& s0_values) {
    const size_t n = velocities.size();
    if (n != s0_values.size()) throw ShapeMismatch("fit_sqrt_model: size mismatch");
    if (n < 4) throw DomainError("fit_sqrt_model: need at least 4 velocity points");
    bool has_zero = false;
    for (double v : velocities) has_zero |= v == 0.0;
    if (!has_zero) throw DomainError("fit_sqrt_model: v = 0 point required");

    bool weighted = true;
    for (const auto& s : s0_values) weighted &= s.std_err > 0.0;

    double sxx = 0, sxy = 0, syy = 0, sxr = 0, syr = 0; // normal equations
    for (size_t i = 0; i < n; ++i) {
        const double w = weighted ? 1.0 / (s0_values[i].std_err * s0_values[i].std_err) : 1.0;
        const double x1 = std::sqrt(velocities[i]);
        const double x2 = velocities[i];
        const double y = s0_values[i].value - 1.0;
        sxx += w * x1 * x1;
        sxy += w * x1 * x2;
        syy += w * x2 * x2;
        sxr += w * x1 * y;
        syr += w * x2 * y;
    }
    const double det = sxx * syy - sxy * sxy;
    if (!(std::abs(det) > 1e-12 * std::max(sxx * syy, 1e-300)))
        throw SingularFit("fit_sqrt_model: design matrix is rank deficient");
    SqrtFit fit;
    fit.b = (syy * sxr - sxy * syr) / det;
    fit.c = (sxx * syr - sxy * sxr) / det;

    // R^2 against the weighted mean of y
    double wsum = 0, ysum = 0;
    for (size_t i = 0; i < n; ++i) {
        const double w = weighted ? 1.0 / (s0_values[i].std_err * s0_values[i].std_err) : 1.0;
        wsum += w;
        ysum += w * (s0_values[i].value - 1.0);
    }
    const double ybar = ysum / wsum;
    double ss_res = 0, ss_tot = 0;
    for (size_t i = 0; i < n; ++i) {
        const double w = weighted ? 1.0 / (s0_values[i].std_err * s0_values[i].std_err) : 1.0;
        const double y = s0_values[i].value - 1.0;
        const double fiti = fit.b * std::sqrt(velocities[i]) + fit.c * velocities[i];
        ss_res += w * (y - fiti) * (y - fiti);
        ss_tot += w * (y - ybar) * (y - ybar);
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;

    // parameter covariance: known errors when weighted, else residual variance
    const double scale = weighted ? 1.0 : ss_res / std::max<double>(1, n - 2);
    fit.b_ci95 = 1.96 * std::sqrt(scale * syy / det);
    fit.c_ci95 = 1.96 * std::sqrt(scale * sxx / det);
    return fit;
}

} // namespace nvflow::md
