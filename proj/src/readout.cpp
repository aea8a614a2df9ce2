#include "lscope/readout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lscope/errors.hpp"

namespace lscope {

ProbePhases probe_phases(const DispersiveParams& dp, double omega_p_GHz) {
    const double half_kb = 0.5 * dp.kappa_b_ang();
    const double det_g = dp.omega_b_ang() - angular(omega_p_GHz);
    const double det_e = det_g - 2.0 * dp.chi_b_ang();
    ProbePhases p;
    p.theta_g = 2.0 * std::atan2(half_kb, det_g);
    p.theta_e = 2.0 * std::atan2(half_kb, det_e);
    return p;
}

ReadoutModel snr_fidelity(const DispersiveParams& dp, const ProbeSpec& probe,
                          const ProbePhases& phases, double Delta_t_ns) {
    if (Delta_t_ns < 0.0) throw ConfigError("integration time must be >= 0");
    ReadoutModel m;
    m.Delta_t = Delta_t_ns;
    m.snr = std::sqrt(dp.kappa_b_ang() * probe.n_b_mean * Delta_t_ns / 4.0) * phases.separation();
    m.fidelity = std::erf(m.snr / std::sqrt(2.0));
    return m;
}

double efficiency_eta1(double pbar_max, double fidelity) {
    return pbar_max * 0.5 * (1.0 + fidelity) + (1.0 - pbar_max) * 0.5 * (1.0 - fidelity);
}

double q_of_tau(double snr, double Delta_t, double tau) {
    if (tau < 0.0) throw ConfigError("duration tau must be >= 0");
    const double s = snr / std::sqrt(2.0);
    if (tau >= Delta_t) return 0.5 * (1.0 + std::erf(s));
    return 0.5 * (1.0 - std::erf(s * (1.0 - 2.0 * tau / Delta_t)));
}

DurationDistribution DurationDistribution::exponential(double Gamma_per_ns) {
    if (!(Gamma_per_ns >= 0.0)) throw ConfigError("decay rate must be >= 0");
    DurationDistribution d;
    d.exponential_ = true;
    d.rate_ = Gamma_per_ns;
    return d;
}

DurationDistribution DurationDistribution::from_trajectory(const Trajectory& traj,
                                                           double t_excited) {
    DurationDistribution d;
    d.exponential_ = false;
    if (traj.t.size() < 3) throw ConfigError("trajectory too short for a duration distribution");
    d.grid_step_ = traj.t[1] - traj.t[0];
    std::size_t k0 = 0;
    while (k0 + 1 < traj.t.size() && traj.t[k0] < t_excited) ++k0;
    const double p0 = traj.p_e[k0];
    if (p0 <= 0.0) throw ConfigError("p_e vanishes at the excitation time");
    // Monotone projection: a running minimum kills numerical-derivative noise.
    d.tail_.reserve(traj.t.size() - k0);
    double run = 1.0;
    for (std::size_t k = k0; k < traj.t.size(); ++k) {
        run = std::min(run, std::max(0.0, traj.p_e[k] / p0));
        d.tail_.push_back(run);
    }
    // Renormalize so tail(0) = 1 exactly.
    if (d.tail_.front() <= 0.0) throw ConfigError("empty duration distribution");
    const double scale = 1.0 / d.tail_.front();
    for (auto& v : d.tail_) v *= scale;
    return d;
}

double DurationDistribution::tail(double tau) const {
    if (tau <= 0.0) return 1.0;
    if (exponential_) return std::exp(-rate_ * tau);
    const double x = tau / grid_step_;
    const auto i = static_cast<std::size_t>(x);
    if (i + 1 >= tail_.size())
        throw ConfigError("duration distribution queried beyond its span");
    const double frac = x - double(i);
    return tail_[i] + frac * (tail_[i + 1] - tail_[i]);
}

double DurationDistribution::density(double tau) const {
    if (exponential_) return tau < 0.0 ? 0.0 : rate_ * std::exp(-rate_ * tau);
    const double x = tau / grid_step_;
    const auto i = static_cast<std::size_t>(std::max(0.0, x));
    if (i + 1 >= tail_.size())
        throw ConfigError("duration distribution queried beyond its span");
    return (tail_[i] - tail_[i + 1]) / grid_step_;
}

double DurationDistribution::span() const {
    if (exponential_) return std::numeric_limits<double>::infinity();
    return grid_step_ * double(tail_.size() - 1);
}

double efficiency_eta2(const DurationDistribution& Q, const ReadoutModel& readout) {
    const double Dt = readout.Delta_t;
    if (Dt <= 0.0) throw ConfigError("integration time must be > 0 for eta2");
    if (std::abs(Q.tail(0.0) - 1.0) > 1e-6)
        throw ConfigError("duration distribution is not normalized");
    // Composite Simpson; the integrand is smooth (erf times exponential/tail),
    // and 4096 panels leave the quadrature error far below 1e-6 relative.
    const int n = 4096;
    const double h = Dt / n;
    double acc = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double tau = k * h;
        const double w = (k == 0 || k == n) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        acc += w * Q.density(tau) * q_of_tau(readout.snr, Dt, tau);
    }
    acc *= h / 3.0;
    return acc + 0.5 * (1.0 + readout.fidelity) * Q.tail(Dt);
}

ZenoEstimate zeno_time(const DispersiveParams& dp, const ProbeSpec& probe) {
    if (!(probe.n_b_mean > 0.0)) throw ConfigError("zeno estimate requires n_b_mean > 0");
    ZenoEstimate z;
    z.interval_angular_ns = 1.0 / (dp.kappa_b_ang() * probe.n_b_mean);
    z.interval_linear_ns = 1.0 / (mhz_to_ghz(dp.kappa_b) * probe.n_b_mean);
    return z;
}

DetectionBand detection_band(const std::vector<double>& omega_s_GHz,
                             const std::vector<double>& eta, double threshold) {
    if (omega_s_GHz.size() != eta.size() || omega_s_GHz.size() < 2)
        throw ConfigError("band extraction needs matching grids with >= 2 points");
    for (std::size_t k = 1; k < omega_s_GHz.size(); ++k)
        if (omega_s_GHz[k] <= omega_s_GHz[k - 1])
            throw ConfigError("band extraction requires a strictly increasing frequency grid");

    const std::size_t n = eta.size();
    bool any = false;
    for (double v : eta) any = any || v > threshold;
    if (!any) {
        std::ostringstream err;
        err << "threshold never crossed: max eta " << *std::max_element(eta.begin(), eta.end())
            << " <= " << threshold;
        throw ConfigError(err.str());
    }

    auto cross = [&](std::size_t a, std::size_t b) {
        // threshold crossing between samples a and b by linear interpolation
        const double x0 = omega_s_GHz[a], x1 = omega_s_GHz[b];
        const double y0 = eta[a], y1 = eta[b];
        return x0 + (threshold - y0) * (x1 - x0) / (y1 - y0);
    };

    DetectionBand band;
    double measure = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const bool in0 = eta[k] > threshold;
        const bool in1 = eta[k + 1] > threshold;
        const double x0 = omega_s_GHz[k], x1 = omega_s_GHz[k + 1];
        if (in0 && in1) measure += x1 - x0;
        else if (in0 != in1) {
            const double xc = cross(k, k + 1);
            measure += in0 ? (xc - x0) : (x1 - xc);
        }
    }

    std::size_t first = 0;
    while (!(eta[first] > threshold)) ++first;
    std::size_t last = n - 1;
    while (!(eta[last] > threshold)) --last;
    band.lo_GHz = first == 0 ? omega_s_GHz.front() : cross(first - 1, first);
    band.hi_GHz = last == n - 1 ? omega_s_GHz.back() : cross(last, last + 1);
    band.center_GHz = 0.5 * (band.lo_GHz + band.hi_GHz);
    band.width_MHz = ghz_to_mhz(measure);
    return band;
}

}  // namespace lscope
