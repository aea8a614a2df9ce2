// Acceptance battery: one pass/fail line per criterion, nonzero exit on any
// failure. Step/truncation verification runs inside the trajectory criteria.
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "lscope/acceptance.hpp"

int main(int argc, char** argv) {
    lscope::AcceptanceOptions opts;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--dt") == 0 && i + 1 < argc) opts.dt = std::atof(argv[++i]);
        if (std::strcmp(argv[i], "--workers") == 0 && i + 1 < argc)
            opts.workers = std::atoi(argv[++i]);
    }
    const auto results = lscope::run_acceptance(opts);
    const int failures = lscope::report_results(results);
    return failures == 0 ? 0 : 1;
}
