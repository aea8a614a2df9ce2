#include "lscope/pipeline.hpp"

#include <algorithm>

namespace lscope {

EfficiencyPoint detection_efficiency(const DispersiveParams& dp, const DriveSpec& drive,
                                     const ProbeSpec& probe, double omega_s_GHz,
                                     double pulse_length_ns, double Delta_t_ns,
                                     const PipelineOptions& opts) {
    PulseSpec pulse;
    pulse.omega_s = omega_s_GHz;
    pulse.length = pulse_length_ns;

    EvolveOptions eopts;
    eopts.t_start = -2.5 * pulse_length_ns;
    eopts.t_end = 1.5 * pulse_length_ns + Delta_t_ns + opts.tail_ns;
    eopts.dt = opts.dt;
    eopts.check_step_halving = opts.check_step_halving;
    eopts.check_truncation = opts.check_truncation;

    const Trajectory traj = evolve_single_photon(dp, drive, probe, pulse, eopts);
    const MovingAverage ma = moving_average(traj, Delta_t_ns);
    const ReadoutModel rm = snr_fidelity(dp, probe, probe_phases(dp, probe.omega_p), Delta_t_ns);

    EfficiencyPoint ep;
    ep.pbar_max = ma.pbar_max;
    ep.fidelity = rm.fidelity;
    ep.eta1 = efficiency_eta1(ma.pbar_max, rm.fidelity);
    ep.max_p_e = *std::max_element(traj.p_e.begin(), traj.p_e.end());
    return ep;
}

}  // namespace lscope
