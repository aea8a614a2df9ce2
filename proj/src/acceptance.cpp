#include "lscope/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "lscope/dressed.hpp"
#include "lscope/dynamics.hpp"
#include "lscope/errors.hpp"
#include "lscope/parallel.hpp"
#include "lscope/pipeline.hpp"
#include "lscope/readout.hpp"

namespace lscope {

namespace {

using Clock = std::chrono::steady_clock;

struct Ctx {
    AcceptanceOptions opts;
    BareParams bare;
    DispersiveParams dp;
    double Om_imp = 0.0;  // MHz at omega_d = 4.832
    DriveSpec drive;      // operating drive
    ProbeSpec probe;      // n_b = 0.05 at omega_b - 2 chi_b
    // hygiene numbers harvested by criterion 6 for criterion 12
    double trace_err = -1.0, herm_err = -1.0, halving_err = -1.0, trunc_err = -1.0;
};

struct Checker {
    std::ostringstream detail;
    bool pass = true;
    bool first = true;

    void sep() {
        if (!first) detail << "; ";
        first = false;
    }
    void in_band(const char* name, double value, double lo, double hi) {
        const bool ok = value >= lo && value <= hi;
        pass = pass && ok;
        sep();
        detail << name << "=" << value << (ok ? " in [" : " OUTSIDE [") << lo << ", " << hi
               << "]";
    }
    void at_most(const char* name, double value, double bound) {
        const bool ok = value <= bound;
        pass = pass && ok;
        sep();
        detail << name << "=" << value << (ok ? " <= " : " EXCEEDS ") << bound;
    }
    void at_least(const char* name, double value, double bound) {
        const bool ok = value >= bound;
        pass = pass && ok;
        sep();
        detail << name << "=" << value << (ok ? " >= " : " BELOW ") << bound;
    }
    void require(const char* name, bool ok) {
        pass = pass && ok;
        sep();
        detail << name << (ok ? " ok" : " FAILED");
    }
    void note(const char* name, double value) {
        sep();
        detail << name << "=" << value;
    }
};

CheckResult run_check(int id, const std::string& name, void (*fn)(Ctx&, Checker&), Ctx& ctx) {
    const auto t0 = Clock::now();
    CheckResult res;
    res.id = id;
    res.name = name;
    Checker ck;
    try {
        fn(ctx, ck);
        res.pass = ck.pass;
        res.detail = ck.detail.str();
    } catch (const std::exception& e) {
        res.pass = false;
        res.detail = std::string("exception: ") + e.what();
    }
    res.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return res;
}

// 1. Dispersive shifts and renormalized frequencies.
void check_dispersive(Ctx& ctx, Checker& ck) {
    const auto t0 = Clock::now();
    const auto dp = derive_dispersive(ctx.bare);
    const double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
    ck.at_most("abs(chi_a - 50 MHz)", std::abs(dp.chi_a - 50.0), 1e-9);
    ck.at_most("abs(chi_b - 160/7 MHz)", std::abs(dp.chi_b - 160.0 / 7.0), 1e-9);
    ck.in_band("chi_b_MHz (paper rounds to 23)", dp.chi_b, 22.5, 23.5);
    ck.in_band("omega_a_GHz", dp.omega_a, 10.050 - 0.001, 10.050 + 0.001);
    ck.in_band("omega_b_GHz", dp.omega_b, 12.023 - 0.001, 12.023 + 0.001);
    ck.in_band("omega_q_GHz", dp.omega_q, 4.927 - 0.001, 4.927 + 0.001);
    ck.at_most("derive_seconds", elapsed, 1e-3);
}

// 2. Impedance-match drive power at three drive frequencies.
void check_impedance_match(Ctx& ctx, Checker& ck) {
    ck.in_band("Omega_imp(4.832)_MHz", ctx.Om_imp, 10.75 - 0.2, 10.75 + 0.2);
    ck.in_band("Omega_imp(4.841)_MHz", find_impedance_match(ctx.dp, 4.841), 17.27 - 0.3,
               17.27 + 0.3);
    ck.in_band("Omega_imp(4.850)_MHz", find_impedance_match(ctx.dp, 4.850), 21.00 - 0.3,
               21.00 + 0.3);
}

// 3. Mixing angles and the residual probe-induced decay branch.
void check_mixing_angles(Ctx& ctx, Checker& ck) {
    const auto spec = diagonalize_dressed(build_hamiltonian(ctx.dp, ctx.drive, FrameSpec{}));
    auto cos2 = [](double th) { return std::cos(th) * std::cos(th); };
    ck.in_band("cos2_theta12", cos2(spec.theta_12), 0.97, 1.0);
    ck.in_band("cos2_theta34", cos2(spec.theta_34), 0.59, 0.63);
    ck.in_band("cos2_theta56", cos2(spec.theta_56), 0.94, 0.98);
    const auto table = decay_table(spec, ctx.dp);
    ck.in_band("kb52_over_kb", table.kb52 / ctx.dp.kappa_b_ang(), 0.007, 0.011);
}

// 4. Pair equalities and sum rules across a random drive-power sweep.
void check_decay_identities(Ctx& ctx, Checker& ck) {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> dist(0.5, 25.0);
    const double ka = ctx.dp.kappa_a_ang();
    const double kb = ctx.dp.kappa_b_ang();
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        const DriveSpec drive{4.832, dist(rng)};
        const auto spec = diagonalize_dressed(build_hamiltonian(ctx.dp, drive, FrameSpec{}));
        const auto t = decay_table(spec, ctx.dp);
        worst = std::max({worst, std::abs(t.ka31 - t.ka42) / ka,
                          std::abs(t.ka32 - t.ka41) / ka, std::abs(t.kb51 - t.kb62) / kb,
                          std::abs(t.kb52 - t.kb61) / kb, std::abs(t.ka31 + t.ka32 - ka) / ka,
                          std::abs(t.ka41 + t.ka42 - ka) / ka,
                          std::abs(t.kb51 + t.kb52 - kb) / kb,
                          std::abs(t.kb61 + t.kb62 - kb) / kb});
    }
    ck.at_most("max_identity_residual_rel(50 draws)", worst, 1e-9);
}

// 5. Reflection dip, off-band reflection, probe-phase convention.
void check_reflection(Ctx& ctx, Checker& ck) {
    const cplx r_match = reflection_coefficient(ctx.dp, ctx.drive, 10.05);
    ck.at_most("abs_r(match, 10.05 GHz)", std::abs(r_match), 0.1);
    const cplx r_far = reflection_coefficient(ctx.dp, ctx.drive, 10.20);
    ck.at_least("abs_r(10.20 GHz)", std::abs(r_far), 0.98);

    // Closed-form convention check at kappa_b = 2 (2 chi_b) exactly, i.e. the
    // paper's rounded chi_b = kappa_b / 2 = 23 MHz.
    DispersiveParams dpc = ctx.dp;
    dpc.chi_b = dpc.kappa_b / 2.0;
    const double omega_p = dpc.omega_b - 2.0 * mhz_to_ghz(dpc.chi_b);
    const auto ph = probe_phases(dpc, omega_p);
    ck.at_most("abs(e^{i theta_g} - (3+4i)/5)", std::abs(ph.unit_g() - cplx(0.6, 0.8)), 1e-9);
    ck.at_most("abs(e^{i theta_e} + 1)", std::abs(ph.unit_e() + 1.0), 1e-9);
}

// 6. Single-photon capture, tracking, and post-pulse decay (probe off).
//    Also harvests the numerical-hygiene measurements for criterion 12.
void check_pulse_capture(Ctx& ctx, Checker& ck) {
    PulseSpec pulse;
    pulse.omega_s = 10.05;
    pulse.length = 100.0;

    EvolveOptions opts;
    opts.t_start = -2.5 * pulse.length;
    opts.t_end = 10000.0;
    opts.dt = ctx.opts.dt;
    opts.record_stride = 10;
    const Trajectory traj = evolve_single_photon(ctx.dp, ctx.drive, std::nullopt, pulse, opts);

    const double max_pe = *std::max_element(traj.p_e.begin(), traj.p_e.end());
    ck.at_least("max_p_e", max_pe, 0.95);

    // Energy bound (the detector cannot beat the delivered pulse energy) and
    // captured-fraction agreement once the pulse has passed. Mid-rise p_e
    // lags the delivered energy by the in-flight resonator population, so the
    // 0.05 agreement is checked where the pulse is over.
    double energy_violation = 0.0;
    double end_gap = 0.0;
    for (std::size_t k = 0; k < traj.t.size(); ++k) {
        const double t = traj.t[k];
        const double cum = pulse.cumulative(t);
        if (t <= 2000.0) energy_violation = std::max(energy_violation, traj.p_e[k] - cum);
        if (t >= 1.5 * pulse.length && t <= 3.0 * pulse.length)
            end_gap = std::max(end_gap, cum - traj.p_e[k]);
    }
    ck.at_most("energy_bound_violation", energy_violation, 1e-3);
    ck.at_most("captured_fraction_gap", end_gap, 0.05);

    // Post-pulse decay rate against gamma.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long m = 0;
    for (std::size_t k = 0; k < traj.t.size(); ++k) {
        if (traj.t[k] < 2000.0 || traj.t[k] > 10000.0) continue;
        sx += traj.t[k]; sy += std::log(traj.p_e[k]);
        sxx += traj.t[k] * traj.t[k]; sxy += traj.t[k] * std::log(traj.p_e[k]);
        ++m;
    }
    const double gamma_fit = -(m * sxy - sx * sy) / (m * sxx - sx * sx);
    ck.in_band("decay_over_gamma", gamma_fit / ctx.dp.gamma_ang(), 0.95, 1.05);

    // Hygiene on a shorter checked window: dt halving and +1 Fock level.
    EvolveOptions hopts = opts;
    hopts.t_end = 1750.0;
    hopts.record_stride = 10;
    const Trajectory base = evolve_single_photon(ctx.dp, ctx.drive, ctx.probe, pulse, hopts);
    EvolveOptions half = hopts;
    half.dt = hopts.dt / 2.0;
    half.record_stride = hopts.record_stride * 2;
    const Trajectory fine = evolve_single_photon(ctx.dp, ctx.drive, ctx.probe, pulse, half);
    DispersiveParams big = ctx.dp;
    big.n_a_max += 1;
    big.n_b_max += 1;
    const Trajectory wide = evolve_single_photon(big, ctx.drive, ctx.probe, pulse, hopts);

    double dhalf = 0.0, dtrunc = 0.0;
    const std::size_t n = std::min({base.p_e.size(), fine.p_e.size(), wide.p_e.size()});
    for (std::size_t k = 0; k < n; ++k) {
        dhalf = std::max(dhalf, std::abs(base.p_e[k] - fine.p_e[k]));
        dtrunc = std::max(dtrunc, std::abs(base.p_e[k] - wide.p_e[k]));
    }
    ctx.halving_err = dhalf;
    ctx.trunc_err = dtrunc;
    ctx.trace_err = std::max({traj.max_trace_err, base.max_trace_err, fine.max_trace_err});
    ctx.herm_err = std::max({traj.max_herm_err, base.max_herm_err, fine.max_herm_err});
    ck.note("step_halving_delta", dhalf);
    ck.note("truncation_delta", dtrunc);
}

// 7. Readout arithmetic.
void check_readout_arithmetic(Ctx& ctx, Checker& ck) {
    const auto phases = probe_phases(ctx.dp, ctx.probe.omega_p);
    const auto rm575 = snr_fidelity(ctx.dp, ctx.probe, phases, 575.0);
    const auto rm939 = snr_fidelity(ctx.dp, ctx.probe, phases, 939.0);
    ck.in_band("SNR(575)", rm575.snr, 2.58 - 0.01, 2.58 + 0.01);
    ck.in_band("F(575)", rm575.fidelity, 0.99 - 0.001, 0.99 + 0.001);
    ck.in_band("SNR(939)", rm939.snr, 3.29 - 0.01, 3.29 + 0.01);
    ck.in_band("F(939)", rm939.fidelity, 0.999 - 0.001, 0.999 + 0.001);
}

// 8. Peak efficiency over pulse length and the detection-band widths.
void check_efficiency(Ctx& ctx, Checker& ck) {
    PipelineOptions popts;
    popts.dt = ctx.opts.dt;
    const int workers = ctx.opts.workers > 0 ? ctx.opts.workers : default_workers();

    std::vector<double> lengths;
    for (double l = 50.0; l <= 130.0 + 1e-9; l += 10.0) lengths.push_back(l);
    std::vector<EfficiencyPoint> pts(lengths.size());
    parallel_for(static_cast<int>(lengths.size()), workers, [&](int i) {
        pts[i] = detection_efficiency(ctx.dp, ctx.drive, ctx.probe, 10.05, lengths[i], 575.0,
                                      popts);
    });
    double best_eta = 0.0, best_l = 0.0;
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        if (pts[i].eta1 > best_eta) {
            best_eta = pts[i].eta1;
            best_l = lengths[i];
        }
    }
    ck.in_band("max_eta1", best_eta, 0.88, 0.94);
    ck.in_band("argmax_l_ns", best_l, 70.0, 110.0);

    std::vector<double> signals;
    for (double w = 10.020; w <= 10.080 + 1e-9; w += 0.002) signals.push_back(w);
    std::vector<double> eta(signals.size());
    parallel_for(static_cast<int>(signals.size()), workers, [&](int i) {
        eta[i] = detection_efficiency(ctx.dp, ctx.drive, ctx.probe, signals[i], 100.0, 575.0,
                                      popts)
                     .eta1;
    });
    const auto band90 = detection_band(signals, eta, 0.9);
    const auto band80 = detection_band(signals, eta, 0.8);
    ck.in_band("band_width_MHz(eta>0.9)", band90.width_MHz, 7.0, 11.0);
    ck.in_band("band_width_MHz(eta>0.8)", band80.width_MHz, 17.0, 23.0);
}

// 9. Probe backaction on the excited-state lifetime.
void check_lifetimes(Ctx& ctx, Checker& ck) {
    const std::vector<double> powers = {0.0, 0.025, 0.05, 0.1};
    std::vector<double> gammas(powers.size());
    for (std::size_t i = 0; i < powers.size(); ++i) {
        std::optional<ProbeSpec> probe;
        if (powers[i] > 0.0) probe = make_probe(ctx.dp, powers[i]);
        gammas[i] = excited_lifetime(ctx.dp, ctx.drive, probe, ctx.opts.dt).Gamma;
    }
    ck.in_band("lifetime_us(n_b=0.05)", 1e-3 / gammas[2], 4.5, 7.5);
    ck.in_band("lifetime_us(n_b=0)", 1e-3 / gammas[0], 15.0, 17.0);
    bool monotone = true;
    for (std::size_t i = 1; i < gammas.size(); ++i)
        monotone = monotone && gammas[i] >= gammas[i - 1] * (1.0 - 1e-9);
    ck.require("decay_rate_monotone_in_probe_power", monotone);
}

// 10. Dark counts under the probe-flux convention.
void check_dark_counts(Ctx& ctx, Checker& ck) {
    const auto dark = dark_count_rate(ctx.dp, ctx.drive, ctx.probe, ctx.opts.dt);
    ck.in_band("per_photon_probability", dark.per_photon, 0.002 / 1.5, 0.002 * 1.5);
    ck.in_band("rate_per_us", dark.rate_per_us, 1.0 / (142.0 * 1.5), 1.5 / 142.0);
    const auto off = dark_count_rate(ctx.dp, ctx.drive, std::nullopt, ctx.opts.dt);
    // Residual qubit-relaxation repopulation (gamma sin^4 theta_12 ~ 1e-5/us)
    // sets the practical floor; it sits two orders below the probe-on rate.
    ck.at_most("probe_off_rate_per_us", std::abs(off.rate_per_us), 1e-4);
}

// 11. Time-averaged vs quantum-jump efficiency models (analytic).
void check_efficiency_models(Ctx& ctx, Checker& ck) {
    const auto phases = probe_phases(ctx.dp, ctx.probe.omega_p);
    auto eta_pair = [&](double Ginv_us, double Dt) {
        const double G = 1e-3 / Ginv_us;
        const auto rm = snr_fidelity(ctx.dp, ctx.probe, phases, Dt);
        const double x = G * Dt;
        const double pbar = (1.0 - std::exp(-x)) / x;
        const double e1 = efficiency_eta1(pbar, rm.fidelity);
        const double e2 = efficiency_eta2(DurationDistribution::exponential(G), rm);
        return std::tuple<double, double, double>{e1, e2, rm.fidelity};
    };

    double max_dev = 0.0;
    for (double Dt = 25.0; Dt <= 1000.0 + 1e-9; Dt += 25.0) {
        const auto [e1, e2, F] = eta_pair(6.0, Dt);
        max_dev = std::max(max_dev, std::abs(e1 - e2));
    }
    ck.at_most("max|eta1-eta2|(G_inv=6us, Dt<=1us)", max_dev, 1e-4);

    // Shape regression over the three lifetimes: interior peak and the
    // deviation bounded by the step-approximation error (zeroth order
    // (1-F)/2 G Dt plus the curvature term of the exponential weight).
    for (double Ginv : {3.0, 6.0, 16.0}) {
        double peak = -1.0, first = -1.0, last = 0.0, worst_excess = -1.0;
        for (double Dt = 25.0; Dt <= 2000.0 + 1e-9; Dt += 25.0) {
            const auto [e1, e2, F] = eta_pair(Ginv, Dt);
            const double x = Dt * 1e-3 / Ginv;
            const double bound = 0.5 * (1.0 - F) * x + 0.04 * x * x;
            worst_excess = std::max(worst_excess, std::abs(e1 - e2) - bound);
            peak = std::max(peak, e1);
            if (first < 0.0) first = e1;
            last = e1;
        }
        const std::string tag = std::to_string(static_cast<int>(Ginv)) + "us)";
        const std::string peak_label = "interior_peak(" + tag;
        ck.require(peak_label.c_str(), peak > first && peak > last);
        const std::string bound_label = "step_bound_excess(" + tag;
        ck.at_most(bound_label.c_str(), worst_excess, 0.0);
    }
}

// 12. Numerical hygiene harvested from the trajectory runs.
void check_numerical_hygiene(Ctx& ctx, Checker& ck) {
    if (ctx.trace_err < 0.0) {
        ck.require("hygiene numbers available (criterion 6 ran)", false);
        return;
    }
    ck.at_most("max_trace_error", ctx.trace_err, 1e-8);
    ck.at_most("max_hermiticity_error", ctx.herm_err, 1e-10);
    ck.at_most("step_halving_delta", ctx.halving_err, 1e-4);
    ck.at_most("fock_truncation_delta", ctx.trunc_err, 1e-3);
}

}  // namespace

std::vector<CheckResult> run_acceptance(const AcceptanceOptions& opts) {
    Ctx ctx;
    ctx.opts = opts;
    ctx.bare = BareParams{};
    ctx.dp = derive_dispersive(ctx.bare);
    ctx.Om_imp = find_impedance_match(ctx.dp, 4.832);
    ctx.drive = DriveSpec{4.832, ctx.Om_imp};
    ctx.probe = make_probe(ctx.dp, 0.05);

    std::vector<CheckResult> results;
    results.push_back(run_check(1, "dispersive shifts", check_dispersive, ctx));
    results.push_back(run_check(2, "impedance match", check_impedance_match, ctx));
    results.push_back(run_check(3, "mixing angles", check_mixing_angles, ctx));
    results.push_back(run_check(4, "decay-table identities", check_decay_identities, ctx));
    results.push_back(run_check(5, "reflection and probe phases", check_reflection, ctx));
    results.push_back(run_check(6, "single-photon capture", check_pulse_capture, ctx));
    results.push_back(run_check(7, "readout arithmetic", check_readout_arithmetic, ctx));
    results.push_back(run_check(8, "detection efficiency and band", check_efficiency, ctx));
    results.push_back(run_check(9, "probe backaction lifetimes", check_lifetimes, ctx));
    results.push_back(run_check(10, "dark counts", check_dark_counts, ctx));
    results.push_back(run_check(11, "efficiency model equivalence", check_efficiency_models, ctx));
    results.push_back(run_check(12, "numerical hygiene", check_numerical_hygiene, ctx));
    return results;
}

int report_results(const std::vector<CheckResult>& results, bool to_stderr) {
    FILE* out = to_stderr ? stderr : stdout;
    int failures = 0;
    for (const auto& r : results) {
        std::fprintf(out, "%s - criterion %2d: %s [%.1fs] %s\n", r.pass ? "PASS" : "FAIL",
                     r.id, r.name.c_str(), r.seconds, r.detail.c_str());
        if (!r.pass) ++failures;
    }
    std::fprintf(out, "%d/%zu acceptance criteria passed\n", int(results.size()) - failures,
                 results.size());
    return failures;
}

void write_regression_report(const std::vector<CheckResult>& results,
                             const std::string& path) {
    nlohmann::json j;
    j["criteria"] = nlohmann::json::array();
    int failures = 0;
    for (const auto& r : results) {
        nlohmann::json cj;
        cj["id"] = r.id;
        cj["name"] = r.name;
        cj["pass"] = r.pass;
        cj["detail"] = r.detail;
        cj["seconds"] = r.seconds;
        j["criteria"].push_back(cj);
        if (!r.pass) ++failures;
    }
    j["failures"] = failures;
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write regression report: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace lscope
