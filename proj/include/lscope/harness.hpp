#pragma once

#include <map>
#include <string>
#include <vector>

#include "lscope/config.hpp"

namespace lscope {

// Headline scalar with the tolerance band it was checked against. Paper-value
// bands are only applied when the run uses the built-in device defaults at
// the reference operating point; otherwise the scalar is reported unchecked.
struct HeadlineScalar {
    std::string name;
    double value = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    bool checked = false;
    bool pass = true;
};

struct FigureReport {
    std::string command;
    std::vector<std::string> csv_files;
    std::vector<HeadlineScalar> headlines;
    std::map<std::string, double> metadata;
    double wall_seconds = 0.0;

    HeadlineScalar& add(const std::string& name, double value);
    HeadlineScalar& add_checked(const std::string& name, double value, double lo, double hi);
    bool all_pass() const;
};

// One reproduction driver per figure-style output; every command writes its
// CSVs plus a summary.json under cfg.output_dir.
FigureReport cmd_dressed_rates(const RunConfig& cfg);      // decay rates vs drive power
FigureReport cmd_reflection_map(const RunConfig& cfg);     // |r_s|(Omega_d, omega_s)
FigureReport cmd_pulse_response(const RunConfig& cfg);     // p_e(t) and windowed averages
FigureReport cmd_efficiency(const RunConfig& cfg);         // eta1 sweeps, map, detection bands
FigureReport cmd_efficiency_models(const RunConfig& cfg);  // eta1 vs eta2, exponential model

void write_summary(const FigureReport& report, const std::string& out_dir);

}  // namespace lscope
