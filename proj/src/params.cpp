#include "lscope/params.hpp"

#include <cmath>
#include <sstream>

#include "lscope/errors.hpp"

namespace lscope {

void BareParams::validate() const {
    std::ostringstream err;
    auto positive = [&](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            err << "parameter " << name << " must be finite and > 0, got " << v;
            throw ConfigError(err.str());
        }
    };
    positive(omega_bar_a, "omega_bar_a");
    positive(omega_bar_b, "omega_bar_b");
    positive(omega_bar_q, "omega_bar_q");
    positive(g_a, "g_a");
    positive(g_b, "g_b");
    positive(kappa_a, "kappa_a");
    positive(kappa_b, "kappa_b");
    positive(gamma, "gamma");
    if (n_a_max < 2 || n_b_max < 2) {
        err << "Fock truncations must be >= 2, got n_a_max=" << n_a_max
            << " n_b_max=" << n_b_max;
        throw ConfigError(err.str());
    }
    const double ratio_a = g_a / std::abs(omega_bar_a - omega_bar_q);
    const double ratio_b = g_b / std::abs(omega_bar_b - omega_bar_q);
    if (ratio_a >= 0.2 || ratio_b >= 0.2) {
        err << "dispersive validity violated: g_r/|omega_bar_r - omega_bar_q| = "
            << ratio_a << " (r=a), " << ratio_b << " (r=b); both must be < 0.2";
        throw ConfigError(err.str());
    }
}

DispersiveParams derive_dispersive(const BareParams& bare) {
    bare.validate();
    DispersiveParams dp;
    const double chi_a_GHz = bare.g_a * bare.g_a / (bare.omega_bar_a - bare.omega_bar_q);
    const double chi_b_GHz = bare.g_b * bare.g_b / (bare.omega_bar_b - bare.omega_bar_q);
    dp.chi_a = ghz_to_mhz(chi_a_GHz);
    dp.chi_b = ghz_to_mhz(chi_b_GHz);
    dp.omega_a = bare.omega_bar_a + chi_a_GHz;
    dp.omega_b = bare.omega_bar_b + chi_b_GHz;
    dp.omega_q = bare.omega_bar_q - chi_a_GHz - chi_b_GHz;
    dp.kappa_a = bare.kappa_a;
    dp.kappa_b = bare.kappa_b;
    dp.gamma = bare.gamma;
    dp.n_a_max = bare.n_a_max;
    dp.n_b_max = bare.n_b_max;
    return dp;
}

std::pair<double, double> nesting_window(const DispersiveParams& dp) {
    return {dp.omega_q - 2.0 * mhz_to_ghz(dp.chi_a), dp.omega_q - 2.0 * mhz_to_ghz(dp.chi_b)};
}

bool in_nesting_window(const DispersiveParams& dp, double omega_d_GHz) {
    auto [lo, hi] = nesting_window(dp);
    return omega_d_GHz > lo && omega_d_GHz < hi;
}

void require_nesting(const DispersiveParams& dp, double omega_d_GHz) {
    if (!in_nesting_window(dp, omega_d_GHz)) {
        auto [lo, hi] = nesting_window(dp);
        std::ostringstream err;
        err << "drive frequency " << omega_d_GHz << " GHz outside the nesting window ("
            << lo << ", " << hi << ") GHz";
        throw ConfigError(err.str());
    }
}

double probe_flux(const DispersiveParams& dp, const ProbeSpec& probe) {
    if (probe.n_b_mean < 0.0) throw ConfigError("probe n_b_mean must be >= 0");
    return dp.kappa_b_ang() * probe.n_b_mean / 4.0;
}

double probe_amplitude(const DispersiveParams& dp, const ProbeSpec& probe) {
    return std::sqrt(probe_flux(dp, probe));
}

ProbeSpec make_probe(const DispersiveParams& dp, double n_b_mean) {
    ProbeSpec p;
    p.omega_p = dp.omega_b - 2.0 * mhz_to_ghz(dp.chi_b);
    p.n_b_mean = n_b_mean;
    return p;
}

}  // namespace lscope
