#pragma once

#include <optional>

#include "lscope/dynamics.hpp"
#include "lscope/readout.hpp"

namespace lscope {

// One detection-efficiency evaluation: capture trajectory, windowed average,
// readout fidelity, then eta1. The window is sized so the averaged maximum
// falls inside the simulated span.
struct EfficiencyPoint {
    double eta1 = 0.0;
    double pbar_max = 0.0;
    double fidelity = 0.0;
    double max_p_e = 0.0;
};

struct PipelineOptions {
    double dt = 0.1;          // ns
    double tail_ns = 400.0;   // simulated margin past pulse end + Delta_t
    bool check_step_halving = false;
    bool check_truncation = false;
};

EfficiencyPoint detection_efficiency(const DispersiveParams& dp, const DriveSpec& drive,
                                     const ProbeSpec& probe, double omega_s_GHz,
                                     double pulse_length_ns, double Delta_t_ns,
                                     const PipelineOptions& opts = {});

}  // namespace lscope
