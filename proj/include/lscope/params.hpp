#pragma once

#include <string>
#include <utility>

#include "lscope/units.hpp"

namespace lscope {

// Bare device parameters. Frequencies and couplings are linear GHz, decay
// rates linear MHz, truncations are the largest retained Fock level.
struct BareParams {
    double omega_bar_a = 10.0;  // GHz
    double omega_bar_b = 12.0;  // GHz
    double omega_bar_q = 5.0;   // GHz
    double g_a = 0.5;           // GHz
    double g_b = 0.4;           // GHz
    double kappa_a = 20.0;      // MHz
    double kappa_b = 46.0;      // MHz
    double gamma = 0.01;        // MHz, total qubit relaxation
    int n_a_max = 3;
    int n_b_max = 3;

    // Positivity, truncations >= 2 and the dispersive-validity bound
    // g_r/|omega_bar_r - omega_bar_q| < 0.2. Throws ConfigError.
    void validate() const;
};

// Parameters after the dispersive transformation: chi_r = g_r^2/(wbar_r - wbar_q),
// omega_a = wbar_a + chi_a, omega_b = wbar_b + chi_b, omega_q = wbar_q - chi_a - chi_b.
// chi values are kept at full precision; quoted round numbers are display only.
struct DispersiveParams {
    double chi_a = 0.0;    // MHz
    double chi_b = 0.0;    // MHz
    double omega_a = 0.0;  // GHz
    double omega_b = 0.0;  // GHz
    double omega_q = 0.0;  // GHz
    double kappa_a = 0.0;  // MHz
    double kappa_b = 0.0;  // MHz
    double gamma = 0.0;    // MHz
    int n_a_max = 3;
    int n_b_max = 3;

    // Angular views, rad/ns.
    double chi_a_ang() const { return angular(mhz_to_ghz(chi_a)); }
    double chi_b_ang() const { return angular(mhz_to_ghz(chi_b)); }
    double omega_a_ang() const { return angular(omega_a); }
    double omega_b_ang() const { return angular(omega_b); }
    double omega_q_ang() const { return angular(omega_q); }
    double kappa_a_ang() const { return angular(mhz_to_ghz(kappa_a)); }
    double kappa_b_ang() const { return angular(mhz_to_ghz(kappa_b)); }
    double gamma_ang() const { return angular(mhz_to_ghz(gamma)); }
};

DispersiveParams derive_dispersive(const BareParams& bare);

// Qubit drive tone: frequency in GHz, Rabi amplitude in MHz.
struct DriveSpec {
    double omega_d = 4.832;  // GHz
    double Omega_d = 0.0;    // MHz

    double omega_d_ang() const { return angular(omega_d); }
    double Omega_d_ang() const { return angular(mhz_to_ghz(Omega_d)); }
};

// Drive-frequency window (omega_q - 2 chi_a, omega_q - 2 chi_b) that nests the
// one-photon doublet of resonator A inside the qubit doublet. GHz, exclusive.
std::pair<double, double> nesting_window(const DispersiveParams& dp);
bool in_nesting_window(const DispersiveParams& dp, double omega_d_GHz);
void require_nesting(const DispersiveParams& dp, double omega_d_GHz);

// Readout probe tone. n_b_mean is the resonant intra-resonator photon number;
// the input flux is |E_p|^2 = kappa_b * n_b_mean / 4 (angular kappa_b), photons/ns.
struct ProbeSpec {
    double omega_p = 0.0;  // GHz
    double n_b_mean = 0.0;
};

double probe_flux(const DispersiveParams& dp, const ProbeSpec& probe);       // photons/ns
double probe_amplitude(const DispersiveParams& dp, const ProbeSpec& probe);  // sqrt(1/ns)

// Probe at omega_b - 2 chi_b: resonant with resonator B when the qubit is
// excited, which suppresses ground-state probe transitions.
ProbeSpec make_probe(const DispersiveParams& dp, double n_b_mean);

}  // namespace lscope
