#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lscope/params.hpp"

namespace lscope {

// Sweep grids; empty vectors fall back to per-command defaults.
struct GridSpec {
    std::vector<double> Omega_d_MHz;
    std::vector<double> omega_s_GHz;
    std::vector<double> pulse_length_ns;
    std::vector<double> Delta_t_ns;
    std::vector<double> n_b_mean;
    std::vector<double> omega_d_GHz;    // drive conditions for band tuning
    std::vector<double> Gamma_inv_us;   // lifetimes for the jump-model comparison
};

struct RunConfig {
    BareParams device;
    double omega_d = 4.832;                 // GHz
    std::optional<double> Omega_d_MHz;      // absent -> solve the impedance match
    double n_b_mean = 0.05;
    std::optional<double> omega_p_GHz;      // absent -> omega_b - 2 chi_b
    double omega_s = 10.05;                 // GHz
    double pulse_length = 100.0;            // ns
    GridSpec grids;
    double dt = 0.1;                        // ns
    std::string output_dir = "out";
    int workers = 0;                        // 0 = hardware concurrency

    // Loads and validates a JSON config; unknown keys anywhere are an error.
    static RunConfig from_file(const std::string& path);
    static RunConfig from_json_text(const std::string& text);

    DispersiveParams dispersive() const { return derive_dispersive(device); }
    DriveSpec drive(const DispersiveParams& dp) const;  // solves Omega_d if absent
    ProbeSpec probe(const DispersiveParams& dp) const;
    int effective_workers() const;
};

}  // namespace lscope
