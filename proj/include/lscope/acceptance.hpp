#pragma once

#include <string>
#include <vector>

namespace lscope {

struct CheckResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    double dt = 0.1;  // ns, trajectory step; halving verification runs at dt/2
    int workers = 0;  // 0 = hardware concurrency
};

// Runs the full regression battery against the built-in device parameters
// and returns one result per criterion. Pure computation; no files written.
std::vector<CheckResult> run_acceptance(const AcceptanceOptions& opts = {});

// Formats "PASS/FAIL - <name>: <detail>" lines; returns the failure count.
int report_results(const std::vector<CheckResult>& results, bool to_stderr = false);

// Machine-readable regression report.
void write_regression_report(const std::vector<CheckResult>& results,
                             const std::string& path);

}  // namespace lscope
