#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "lscope/acceptance.hpp"
#include "lscope/errors.hpp"
#include "lscope/harness.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitConvergence = 3;
constexpr int kExitRegression = 4;

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    int workers = -1;
    double dt = -1.0;
    int na_max = -1;
    int nb_max = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON run configuration");
    cmd->add_option("--out", args.out_dir, "output directory (overrides config)");
    cmd->add_option("--workers", args.workers, "worker threads (0 = auto)");
    cmd->add_option("--dt", args.dt, "integrator step in ns");
    cmd->add_option("--na-max", args.na_max, "resonator A Fock truncation");
    cmd->add_option("--nb-max", args.nb_max, "resonator B Fock truncation");
}

lscope::RunConfig load_config(const CommonArgs& args) {
    lscope::RunConfig cfg;
    if (!args.config_path.empty()) cfg = lscope::RunConfig::from_file(args.config_path);
    if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
    if (args.workers >= 0) cfg.workers = args.workers;
    if (args.dt > 0.0) cfg.dt = args.dt;
    if (args.na_max >= 0) cfg.device.n_a_max = args.na_max;
    if (args.nb_max >= 0) cfg.device.n_b_max = args.nb_max;
    cfg.device.validate();
    return cfg;
}

void print_report(const lscope::FigureReport& rep) {
    std::printf("%s finished in %.1f s\n", rep.command.c_str(), rep.wall_seconds);
    for (const auto& f : rep.csv_files) std::printf("  wrote %s\n", f.c_str());
    for (const auto& h : rep.headlines) {
        if (h.checked) {
            std::printf("  %s = %.6g  [%.6g, %.6g] %s\n", h.name.c_str(), h.value, h.lo,
                        h.hi, h.pass ? "ok" : "MISS");
        } else {
            std::printf("  %s = %.6g\n", h.name.c_str(), h.value);
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"driven qubit-resonator single-photon detector toolkit"};
    app.require_subcommand(1);

    CommonArgs args;
    using Runner = lscope::FigureReport (*)(const lscope::RunConfig&);
    struct Sub {
        const char* name;
        const char* help;
        Runner fn;
    };
    const Sub subs[] = {
        {"dressed-rates", "dressed decay rates vs drive power", lscope::cmd_dressed_rates},
        {"reflection-map", "signal reflection amplitude map", lscope::cmd_reflection_map},
        {"pulse-response", "single-photon capture trajectories", lscope::cmd_pulse_response},
        {"efficiency", "detection efficiency sweeps and bands", lscope::cmd_efficiency},
        {"efficiency-models", "time-averaged vs quantum-jump efficiency",
         lscope::cmd_efficiency_models},
    };
    Runner selected = nullptr;
    for (const auto& s : subs) {
        CLI::App* cmd = app.add_subcommand(s.name, s.help);
        add_common(cmd, args);
        cmd->callback([&selected, fn = s.fn] { selected = fn; });
    }
    bool regression = false;
    {
        CLI::App* cmd = app.add_subcommand("regression", "run the full acceptance battery");
        add_common(cmd, args);
        cmd->callback([&regression] { regression = true; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : kExitConfig;
    }

    try {
        const lscope::RunConfig cfg = load_config(args);
        if (regression) {
            lscope::AcceptanceOptions aopts;
            aopts.dt = cfg.dt;
            aopts.workers = cfg.effective_workers();
            const auto results = lscope::run_acceptance(aopts);
            const int failures = lscope::report_results(results);
            std::filesystem::create_directories(cfg.output_dir);
            lscope::write_regression_report(
                results, (std::filesystem::path(cfg.output_dir) / "regression_report.json")
                             .string());
            return failures == 0 ? 0 : kExitRegression;
        }
        const lscope::FigureReport rep = selected(cfg);
        print_report(rep);
        return 0;
    } catch (const lscope::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const lscope::ConvergenceError& e) {
        std::fprintf(stderr, "convergence error: %s\n", e.what());
        return kExitConvergence;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
