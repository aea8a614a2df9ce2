#pragma once

#include <vector>

#include "lscope/dynamics.hpp"
#include "lscope/params.hpp"

namespace lscope {

// Probe reflection phases for the two qubit states:
// theta_g = 2 arctan[kappa_b / (2 (omega_b - omega_p))], theta_e likewise with
// omega_b -> omega_b - 2 chi_b. The branch puts the on-resonance phase at pi.
struct ProbePhases {
    double theta_g = 0.0;  // rad
    double theta_e = 0.0;

    cplx unit_g() const { return std::polar(1.0, theta_g); }
    cplx unit_e() const { return std::polar(1.0, theta_e); }
    double separation() const { return std::abs(unit_g() - unit_e()); }  // in [0, 2]
};

ProbePhases probe_phases(const DispersiveParams& dp, double omega_p_GHz);

// Quantum-limited homodyne discrimination of the two probe phases over an
// integration window: SNR = sqrt(kappa_b <n_b> Delta_t / 4) |e^{i theta_g} - e^{i theta_e}|,
// fidelity F = erf(SNR / sqrt(2)).
struct ReadoutModel {
    double snr = 0.0;
    double fidelity = 0.0;
    double Delta_t = 0.0;  // ns
};

ReadoutModel snr_fidelity(const DispersiveParams& dp, const ProbeSpec& probe,
                          const ProbePhases& phases, double Delta_t_ns);

// eta = pbar (1+F)/2 + (1-pbar)(1-F)/2.
double efficiency_eta1(double pbar_max, double fidelity);

// Probability of flagging the qubit excited given an excitation of duration
// tau inside one integration window; constant (1+F)/2 for tau > Delta_t.
double q_of_tau(double snr, double Delta_t, double tau);

// Distribution of the excited-state duration. Either the exponential model
// Q(tau) = Gamma exp(-Gamma tau) or a tail extracted from a simulated decay.
class DurationDistribution {
  public:
    static DurationDistribution exponential(double Gamma_per_ns);
    // Conditional duration distribution from a simulated p_e(t) decay:
    // tail(tau) = p_e(t_excited + tau) / p_e(t_excited), monotone-projected
    // and renormalized so negative numerical-derivative noise cannot leak in.
    static DurationDistribution from_trajectory(const Trajectory& traj, double t_excited);

    double tail(double tau) const;     // integral of Q from tau to infinity
    double density(double tau) const;  // Q(tau); only valid inside the grid span
    double span() const;               // ns covered by the density

  private:
    bool exponential_ = true;
    double rate_ = 0.0;
    double grid_step_ = 0.0;
    std::vector<double> tail_;  // tail_[k] at tau = k * grid_step_
};

// eta2 = integral Q(tau) q(tau) dtau: composite Simpson over [0, Delta_t]
// plus the closed tail (1+F)/2 * integral_{Delta_t}^inf Q.
double efficiency_eta2(const DurationDistribution& Q, const ReadoutModel& readout);

// Effective continuous-measurement interval 1/(kappa_b <n_b>). The quoted
// device number sits between the angular and linear readings, so both are
// reported rather than guessing a convention.
struct ZenoEstimate {
    double interval_angular_ns = 0.0;  // angular kappa_b
    double interval_linear_ns = 0.0;   // linear kappa_b
};

ZenoEstimate zeno_time(const DispersiveParams& dp, const ProbeSpec& probe);

// Threshold band of an efficiency curve sampled on a monotone frequency grid:
// outermost linear-interpolated crossings, plus the measure of the region
// above threshold (equal to hi - lo for a single-lobe band).
struct DetectionBand {
    double center_GHz = 0.0;
    double lo_GHz = 0.0;
    double hi_GHz = 0.0;
    double width_MHz = 0.0;  // total measure above threshold
};

DetectionBand detection_band(const std::vector<double>& omega_s_GHz,
                             const std::vector<double>& eta, double threshold);

}  // namespace lscope
