#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "lscope/lindblad.hpp"
#include "lscope/params.hpp"

namespace lscope {

// Gaussian single-photon wavepacket, amplitude FWHM = length:
// xi(t) = scale * (8 ln2 / (pi l^2))^{1/4} * 2^{-(2t/l)^2}, centered at t = 0.
// With scale = 1 the envelope is normalized, integral |xi|^2 dt = 1.
struct PulseSpec {
    double omega_s = 10.05;  // GHz carrier
    double length = 100.0;   // ns
    double scale = 1.0;      // 0 switches the pulse off

    double envelope(double t) const;
    double cumulative(double t) const;  // integral of |xi|^2 up to t (scale^2 included)
};

struct EvolveOptions {
    double t_start = -250.0;  // ns
    double t_end = 2000.0;    // ns
    double dt = 0.1;          // ns
    int record_stride = 1;
    // Optional convergence verification (reruns the trajectory):
    bool check_step_halving = false;  // |p_e(dt) - p_e(dt/2)| must stay < 1e-4
    bool check_truncation = false;    // +1 Fock level must move p_e < 1e-3
};

struct Trajectory {
    std::vector<double> t;    // ns
    std::vector<double> p_e;  // excited-branch population
    std::vector<double> n_a;
    std::vector<double> n_b;
    double dt = 0.1;
    int n_a_max = 3;
    int n_b_max = 3;
    double max_trace_err = 0.0;  // max |tr rho - 1| along the run
    double max_herm_err = 0.0;   // max elementwise |rho - rho^dag|
};

// Single-photon response: propagates the two-index Fock-state hierarchy
// (rho00, rho10, rho11) with fixed-step RK4. The input photon enters through
// the resonator-A collapse channel with envelope xi(t); expectations are read
// from rho11. Frame: qubit at omega_d, resonator A at the pulse carrier,
// resonator B at the probe tone, so the generator is static and xi real.
// Initial state is the dressed ground level.
Trajectory evolve_single_photon(const DispersiveParams& dp, const DriveSpec& drive,
                                const std::optional<ProbeSpec>& probe, const PulseSpec& pulse,
                                const EvolveOptions& opts);

// Plain Lindblad trajectory from an arbitrary initial state (no photon input).
Trajectory evolve_population(const DispersiveParams& dp, const DriveSpec& drive,
                             const std::optional<ProbeSpec>& probe,
                             const Eigen::MatrixXcd& rho0, const EvolveOptions& opts);

// Final density matrix of a plain Lindblad integration (steady-state oracle).
Eigen::MatrixXcd integrate_density(const Liouvillian& liou, const Eigen::MatrixXcd& rho0,
                                   double t_end, double dt);

// Windowed average pbar(t) = (1/Delta_t) * integral of p_e over [t-Delta_t, t],
// trapezoidal, defined where the window fits inside the trajectory.
struct MovingAverage {
    std::vector<double> t;
    std::vector<double> pbar;
    double t_m = 0.0;        // argmax, earliest on ties
    double pbar_max = 0.0;
};

MovingAverage moving_average(const Trajectory& traj, double Delta_t);

struct LifetimeFit {
    double Gamma = 0.0;      // 1/ns
    double residual = 0.0;   // max |log p_e - fit|
    double inverse_us() const { return 1e-3 / Gamma; }
};

// Exponential fit of p_e(t) over [fit_lo, fit_hi] (default 0.5..5 us),
// starting from the excited dressed level with the probe on. Throws
// ConvergenceError when the decay is visibly non-exponential.
LifetimeFit excited_lifetime(const DispersiveParams& dp, const DriveSpec& drive,
                             const std::optional<ProbeSpec>& probe, double dt = 0.1,
                             double fit_lo = 500.0, double fit_hi = 5000.0);

struct DarkCountResult {
    double rate_per_us = 0.0;
    double per_photon = 0.0;  // rate / input photon flux
    double window_lo = 0.0, window_hi = 0.0;
};

// Early-time linear growth of p_e from the dressed ground state with the
// probe on and no signal. The fit window shrinks automatically if the growth
// already saturates inside it.
DarkCountResult dark_count_rate(const DispersiveParams& dp, const DriveSpec& drive,
                                const std::optional<ProbeSpec>& probe, double dt = 0.1);

}  // namespace lscope
