#include "lscope/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lscope/dressed.hpp"
#include "lscope/errors.hpp"

namespace lscope {

namespace {
constexpr double kLn2 = 0.6931471805599453094172321;
}

double PulseSpec::envelope(double t) const {
    if (scale == 0.0) return 0.0;
    const double norm = std::pow(8.0 * kLn2 / (kTwoPi / 2.0 * length * length), 0.25);
    const double u = 2.0 * t / length;
    return scale * norm * std::exp2(-u * u);
}

double PulseSpec::cumulative(double t) const {
    // integral of |xi|^2 = scale^2 * (1 + erf(sqrt(8 ln2) t / l)) / 2
    const double u = std::sqrt(8.0 * kLn2) * t / length;
    return scale * scale * 0.5 * (1.0 + std::erf(u));
}

namespace {

using Buffer = std::vector<cplx>;

void adjoint_into(int D, const cplx* rho, cplx* out) {
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) out[std::size_t(i) * D + j] = std::conj(rho[std::size_t(j) * D + i]);
}

struct Observables {
    Eigen::MatrixXcd P;  // excited-branch projector
    std::vector<double> na_diag, nb_diag;

    double p_e(int D, const cplx* rho) const {
        // Re tr(P rho) with rho row-major
        double acc = 0.0;
        for (int i = 0; i < D; ++i) {
            const cplx* col = rho + i;  // rho[j*D + i] walks column i
            for (int j = 0; j < D; ++j) acc += std::real(P(i, j) * col[std::size_t(j) * D]);
        }
        return acc;
    }
    double number(int D, const std::vector<double>& diag, const cplx* rho) const {
        double acc = 0.0;
        for (int i = 0; i < D; ++i) acc += diag[i] * std::real(rho[std::size_t(i) * D + i]);
        return acc;
    }
};

// RK4 over a stacked state of ncomp density-matrix components. The generator
// is shared; the hierarchy couplings enter through the rhs callback.
class Integrator {
  public:
    Integrator(const Liouvillian& liou, int ncomp, const PulseSpec* pulse)
        : gen_(liou.generator()),
          D_(liou.dim()),
          N_(std::size_t(D_) * D_),
          ncomp_(ncomp),
          pulse_(pulse),
          La_(op_a(liou.basis()).scaled(std::sqrt(liou.params().kappa_a_ang()))),
          La_adj_(adjoint(La_)) {}

    void rhs(double t, const cplx* s, cplx* ds) const {
        for (int c = 0; c < ncomp_; ++c) gen_.apply(s + c * N_, ds + c * N_);
        if (ncomp_ == 3 && pulse_ != nullptr) {
            const double xi = pulse_->envelope(t);
            if (xi != 0.0) {
                const cplx* r00 = s;
                const cplx* r10 = s + N_;
                cplx* d10 = ds + N_;
                cplx* d11 = ds + 2 * N_;
                // d10 += xi [r00, La†]
                kernel::add_line_right(D_, La_adj_, xi, r00, d10);
                kernel::add_line_left(D_, La_adj_, -xi, r00, d10);
                // d11 += xi [r01, La†] + xi [La, r10],  r01 = r10†
                adj_buf_.resize(N_);
                adjoint_into(D_, r10, adj_buf_.data());
                kernel::add_line_right(D_, La_adj_, xi, adj_buf_.data(), d11);
                kernel::add_line_left(D_, La_adj_, -xi, adj_buf_.data(), d11);
                kernel::add_line_left(D_, La_, xi, r10, d11);
                kernel::add_line_right(D_, La_, -xi, r10, d11);
            }
        }
    }

    void step(double t, double dt, Buffer& s) const {
        const std::size_t n = s.size();
        k1_.resize(n); k2_.resize(n); k3_.resize(n); k4_.resize(n); tmp_.resize(n);
        rhs(t, s.data(), k1_.data());
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = s[i] + 0.5 * dt * k1_[i];
        rhs(t + 0.5 * dt, tmp_.data(), k2_.data());
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = s[i] + 0.5 * dt * k2_[i];
        rhs(t + 0.5 * dt, tmp_.data(), k3_.data());
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = s[i] + dt * k3_[i];
        rhs(t + dt, tmp_.data(), k4_.data());
        const double w = dt / 6.0;
        for (std::size_t i = 0; i < n; ++i)
            s[i] += w * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
    }

    std::size_t matrix_size() const { return N_; }
    int dim() const { return D_; }

  private:
    const Generator& gen_;
    int D_;
    std::size_t N_;
    int ncomp_;
    const PulseSpec* pulse_;
    LineOp La_, La_adj_;
    mutable Buffer k1_, k2_, k3_, k4_, tmp_, adj_buf_;
};

double herm_defect(int D, const cplx* rho) {
    double worst = 0.0;
    for (int i = 0; i < D; ++i)
        for (int j = i; j < D; ++j) {
            const cplx d = rho[std::size_t(i) * D + j] - std::conj(rho[std::size_t(j) * D + i]);
            worst = std::max(worst, std::abs(d));
        }
    return worst;
}

double trace_real(int D, const cplx* rho) {
    double tr = 0.0;
    for (int i = 0; i < D; ++i) tr += std::real(rho[std::size_t(i) * D + i]);
    return tr;
}

struct RunSetup {
    DispersiveParams dp;
    DriveSpec drive;
    std::optional<ProbeSpec> probe;
    std::optional<PulseSpec> pulse;  // hierarchy input when present
    Eigen::MatrixXcd rho0;           // initial state for plain runs; ignored for hierarchy
    bool rho0_is_ground = true;      // hierarchy: start from dressed ground
};

Trajectory run_trajectory(const RunSetup& setup, const EvolveOptions& opts) {
    const auto& dp = setup.dp;
    if (opts.dt <= 0.0 || opts.t_end <= opts.t_start)
        throw ConfigError("invalid integration window or step");
    // Grid sanity against the fastest decay and the pulse width.
    if (opts.dt > 0.5 / dp.kappa_b_ang())
        throw ConfigError("dt too coarse to resolve the resonator-B decay");
    if (setup.pulse && setup.pulse->scale != 0.0 && opts.dt > setup.pulse->length / 200.0)
        throw ConfigError("dt too coarse to resolve the pulse envelope");

    FrameSpec frame;
    frame.res_a = setup.pulse ? setup.pulse->omega_s : dp.omega_a;
    frame.res_b = setup.probe ? setup.probe->omega_p : dp.omega_b;
    std::vector<CoherentDrive> drives;
    if (setup.probe && setup.probe->n_b_mean > 0.0)
        drives.push_back(CoherentDrive{'b', probe_amplitude(dp, *setup.probe)});

    Liouvillian liou(dp, setup.drive, frame, drives);
    const int D = liou.dim();
    const std::size_t N = std::size_t(D) * D;
    const bool hierarchy = setup.pulse.has_value();
    const int ncomp = hierarchy ? 3 : 1;
    Integrator integ(liou, ncomp, setup.pulse ? &*setup.pulse : nullptr);

    Observables obs;
    obs.P = qubit_excited_projector(dp, setup.drive);
    obs.na_diag.resize(D);
    obs.nb_diag.resize(D);
    for (int i = 0; i < D; ++i) {
        obs.na_diag[i] = liou.basis().na_of(i);
        obs.nb_diag[i] = liou.basis().nb_of(i);
    }

    Eigen::MatrixXcd rho0 = setup.rho0;
    if (hierarchy && setup.rho0_is_ground) {
        const auto spec = diagonalize_dressed(build_hamiltonian(dp, setup.drive, FrameSpec{}));
        rho0 = spec.projector(1);
    }

    Buffer state(ncomp * N, cplx(0.0));
    auto load = [&](int comp) {
        cplx* dst = state.data() + comp * N;
        for (int i = 0; i < D; ++i)
            for (int j = 0; j < D; ++j) dst[std::size_t(i) * D + j] = rho0(i, j);
    };
    load(0);
    if (hierarchy) load(2);  // rho10 starts at zero

    const long nt = std::lround((opts.t_end - opts.t_start) / opts.dt);
    const int stride = std::max(1, opts.record_stride);
    Trajectory traj;
    traj.dt = opts.dt;
    traj.n_a_max = dp.n_a_max;
    traj.n_b_max = dp.n_b_max;
    traj.t.reserve(nt / stride + 2);
    traj.p_e.reserve(nt / stride + 2);

    const cplx* phys = state.data() + (hierarchy ? 2 * N : 0);
    auto record = [&](long k) {
        traj.t.push_back(opts.t_start + k * opts.dt);
        traj.p_e.push_back(obs.p_e(D, phys));
        traj.n_a.push_back(obs.number(D, obs.na_diag, phys));
        traj.n_b.push_back(obs.number(D, obs.nb_diag, phys));
        traj.max_trace_err = std::max(traj.max_trace_err, std::abs(trace_real(D, phys) - 1.0));
        traj.max_herm_err = std::max(traj.max_herm_err, herm_defect(D, phys));
        if (hierarchy) {
            traj.max_trace_err =
                std::max(traj.max_trace_err, std::abs(trace_real(D, state.data()) - 1.0));
        }
    };
    record(0);
    for (long k = 0; k < nt; ++k) {
        integ.step(opts.t_start + k * opts.dt, opts.dt, state);
        if ((k + 1) % stride == 0 || k + 1 == nt) record(k + 1);
    }
    return traj;
}

void verify_convergence(const RunSetup& setup, const EvolveOptions& opts, const Trajectory& traj) {
    if (opts.check_step_halving) {
        EvolveOptions half = opts;
        half.dt = opts.dt / 2.0;
        half.record_stride = opts.record_stride * 2;
        half.check_step_halving = false;
        half.check_truncation = false;
        const Trajectory fine = run_trajectory(setup, half);
        const std::size_t n = std::min(traj.p_e.size(), fine.p_e.size());
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            worst = std::max(worst, std::abs(traj.p_e[i] - fine.p_e[i]));
        if (worst > 1e-4) {
            std::ostringstream err;
            err << "step-halving check failed: max |delta p_e| = " << worst
                << " at dt = " << opts.dt << " ns; use a smaller dt";
            throw ConvergenceError(err.str());
        }
    }
    if (opts.check_truncation) {
        RunSetup bigger = setup;
        bigger.dp.n_a_max += 1;
        bigger.dp.n_b_max += 1;
        EvolveOptions sub = opts;
        sub.check_step_halving = false;
        sub.check_truncation = false;
        if (!bigger.rho0_is_ground && bigger.rho0.size() > 0) {
            // re-embed the initial state in the enlarged basis
            const BasisLayout small{setup.dp.n_a_max, setup.dp.n_b_max};
            const BasisLayout big{bigger.dp.n_a_max, bigger.dp.n_b_max};
            Eigen::MatrixXcd r0 = Eigen::MatrixXcd::Zero(big.dim(), big.dim());
            for (int i = 0; i < small.dim(); ++i)
                for (int j = 0; j < small.dim(); ++j) {
                    const int bi = big.index(small.q_of(i), small.na_of(i), small.nb_of(i));
                    const int bj = big.index(small.q_of(j), small.na_of(j), small.nb_of(j));
                    r0(bi, bj) = bigger.rho0(i, j);
                }
            bigger.rho0 = std::move(r0);
        }
        const Trajectory wide = run_trajectory(bigger, sub);
        const std::size_t n = std::min(traj.p_e.size(), wide.p_e.size());
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            worst = std::max(worst, std::abs(traj.p_e[i] - wide.p_e[i]));
        if (worst > 1e-3) {
            std::ostringstream err;
            err << "Fock-truncation check failed: +1 level moves p_e by " << worst
                << "; raise n_a_max/n_b_max";
            throw ConvergenceError(err.str());
        }
    }
}

}  // namespace

Trajectory evolve_single_photon(const DispersiveParams& dp, const DriveSpec& drive,
                                const std::optional<ProbeSpec>& probe, const PulseSpec& pulse,
                                const EvolveOptions& opts) {
    RunSetup setup{dp, drive, probe, pulse, {}, true};
    Trajectory traj = run_trajectory(setup, opts);
    verify_convergence(setup, opts, traj);
    return traj;
}

Trajectory evolve_population(const DispersiveParams& dp, const DriveSpec& drive,
                             const std::optional<ProbeSpec>& probe,
                             const Eigen::MatrixXcd& rho0, const EvolveOptions& opts) {
    RunSetup setup{dp, drive, probe, std::nullopt, rho0, false};
    Trajectory traj = run_trajectory(setup, opts);
    verify_convergence(setup, opts, traj);
    return traj;
}

Eigen::MatrixXcd integrate_density(const Liouvillian& liou, const Eigen::MatrixXcd& rho0,
                                   double t_end, double dt) {
    const int D = liou.dim();
    const std::size_t N = std::size_t(D) * D;
    Integrator integ(liou, 1, nullptr);
    Buffer state(N);
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) state[std::size_t(i) * D + j] = rho0(i, j);
    const long nt = std::lround(t_end / dt);
    for (long k = 0; k < nt; ++k) integ.step(k * dt, dt, state);
    Eigen::MatrixXcd out(D, D);
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) out(i, j) = state[std::size_t(i) * D + j];
    return out;
}

MovingAverage moving_average(const Trajectory& traj, double Delta_t) {
    if (traj.t.size() < 2) throw ConfigError("trajectory too short for a windowed average");
    const double h = traj.t[1] - traj.t[0];
    if (Delta_t < h) throw ConfigError("averaging window shorter than one grid step");
    const double span = traj.t.back() - traj.t.front();
    if (Delta_t > span) throw ConfigError("averaging window exceeds the trajectory span");

    const std::size_t n = traj.t.size();
    std::vector<double> prefix(n, 0.0);
    for (std::size_t k = 1; k < n; ++k)
        prefix[k] = prefix[k - 1] + 0.5 * (traj.p_e[k] + traj.p_e[k - 1]) * h;

    auto prefix_at = [&](double t) {
        const double x = (t - traj.t.front()) / h;
        const auto i = static_cast<std::size_t>(std::clamp(std::floor(x), 0.0, double(n - 2)));
        const double frac = x - double(i);
        return prefix[i] + frac * (prefix[i + 1] - prefix[i]);
    };

    MovingAverage ma;
    ma.pbar_max = -1.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = traj.t[k];
        if (t - Delta_t < traj.t.front() - 1e-9) continue;
        const double val = (prefix[k] - prefix_at(t - Delta_t)) / Delta_t;
        ma.t.push_back(t);
        ma.pbar.push_back(val);
        if (val > ma.pbar_max) {  // strict: earliest maximum wins ties
            ma.pbar_max = val;
            ma.t_m = t;
        }
    }
    return ma;
}

LifetimeFit excited_lifetime(const DispersiveParams& dp, const DriveSpec& drive,
                             const std::optional<ProbeSpec>& probe, double dt, double fit_lo,
                             double fit_hi) {
    const auto spec = diagonalize_dressed(build_hamiltonian(dp, drive, FrameSpec{}));
    EvolveOptions opts;
    opts.t_start = 0.0;
    opts.t_end = fit_hi;
    opts.dt = dt;
    opts.record_stride = 10;
    const Trajectory traj = evolve_population(dp, drive, probe, spec.projector(2), opts);

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long m = 0;
    for (std::size_t k = 0; k < traj.t.size(); ++k) {
        if (traj.t[k] < fit_lo || traj.t[k] > fit_hi) continue;
        if (traj.p_e[k] <= 0.0) throw ConvergenceError("p_e non-positive inside the fit window");
        const double x = traj.t[k];
        const double y = std::log(traj.p_e[k]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++m;
    }
    if (m < 8) throw ConfigError("lifetime fit window contains too few samples");
    const double denom = m * sxx - sx * sx;
    const double slope = (m * sxy - sx * sy) / denom;
    const double icept = (sy - slope * sx) / m;

    double residual = 0.0;
    for (std::size_t k = 0; k < traj.t.size(); ++k) {
        if (traj.t[k] < fit_lo || traj.t[k] > fit_hi) continue;
        residual = std::max(residual,
                            std::abs(std::log(traj.p_e[k]) - (icept + slope * traj.t[k])));
    }
    if (residual > 0.15) {
        std::ostringstream err;
        err << "decay is not exponential over [" << fit_lo << ", " << fit_hi
            << "] ns: max log-residual " << residual;
        throw ConvergenceError(err.str());
    }
    return LifetimeFit{-slope, residual};
}

namespace {

double linear_slope(const Trajectory& traj, double lo, double hi) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long m = 0;
    for (std::size_t k = 0; k < traj.t.size(); ++k) {
        if (traj.t[k] < lo || traj.t[k] > hi) continue;
        sx += traj.t[k]; sy += traj.p_e[k];
        sxx += traj.t[k] * traj.t[k]; sxy += traj.t[k] * traj.p_e[k];
        ++m;
    }
    if (m < 8) throw ConfigError("dark-count fit window contains too few samples");
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace

DarkCountResult dark_count_rate(const DispersiveParams& dp, const DriveSpec& drive,
                                const std::optional<ProbeSpec>& probe, double dt) {
    const auto spec = diagonalize_dressed(build_hamiltonian(dp, drive, FrameSpec{}));
    EvolveOptions opts;
    opts.t_start = 0.0;
    opts.t_end = 1300.0;
    opts.dt = dt;
    opts.record_stride = 5;
    const Trajectory traj = evolve_population(dp, drive, probe, spec.projector(1), opts);

    // Skip the probe ring-up, then require the slope to be stable across the
    // two window halves; shrink toward early times if growth saturates.
    double lo = 300.0, hi = 1300.0;
    double slope = 0.0;
    bool stable = false;
    for (int iter = 0; iter < 4 && !stable; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double s1 = linear_slope(traj, lo, mid);
        const double s2 = linear_slope(traj, mid, hi);
        slope = linear_slope(traj, lo, hi);
        const double scale = std::max({std::abs(s1), std::abs(s2), 1e-9 * 1e-3});
        stable = std::abs(s1 - s2) <= 0.3 * scale;
        if (!stable) hi = lo + 0.6 * (hi - lo);
    }
    if (!stable) {
        std::ostringstream err;
        err << "dark-count growth slope unstable even on [" << lo << ", " << hi << "] ns";
        throw ConvergenceError(err.str());
    }
    DarkCountResult res;
    res.rate_per_us = slope * 1e3;
    const double flux = probe ? probe_flux(dp, *probe) : 0.0;
    res.per_photon = flux > 0.0 ? slope / flux : 0.0;
    res.window_lo = lo;
    res.window_hi = hi;
    return res;
}

}  // namespace lscope
