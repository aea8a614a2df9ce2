#pragma once

#include <array>

#include <Eigen/Dense>

#include "lscope/operators.hpp"
#include "lscope/params.hpp"

namespace lscope {

// Eigenstates of the driven rotating-frame Hamiltonian restricted to the
// n_a + n_b <= 1 manifold, labeled 1..6 from the lowest energy. Labels 1,2
// live in the zero-photon sector, 3,4 carry one photon in resonator A and
// 5,6 one photon in resonator B. Energies are rad/ns in the drive frame.
struct DressedSpectrum {
    std::array<double, 6> energy{};               // ascending, index = label-1
    std::array<Eigen::VectorXcd, 6> state{};      // full-dimension eigenvectors
    std::array<double, 6> dominant_weight{};      // squared overlap with the bare state
    double theta_12 = 0.0;                        // rad
    double theta_34 = 0.0;
    double theta_56 = 0.0;
    BasisLayout basis;
    DriveSpec drive;

    const Eigen::VectorXcd& ket(int label) const { return state[label - 1]; }
    double energy_of(int label) const { return energy[label - 1]; }
    Eigen::MatrixXcd projector(int label) const;
};

// Requires a Hamiltonian built in the qubit-only frame (no resonator
// rotations): the spectrum is labeled by ascending energy in that frame.
// Throws DegeneracyError on a manifold eigenvalue tie and when a dressed
// state lacks a dominant (> 0.5) bare-state overlap.
DressedSpectrum diagonalize_dressed(const HamiltonianMatrix& h);

// Radiative rates between dressed levels, kappa_r |<j|x_dag|i>|^2, rad/ns.
struct DecayTable {
    double ka31 = 0, ka32 = 0, ka41 = 0, ka42 = 0;  // resonator A, j in {3,4}
    double kb51 = 0, kb52 = 0, kb61 = 0, kb62 = 0;  // resonator B, j in {5,6}

    double ka31_MHz() const { return ghz_to_mhz(linear(ka31)); }
    double ka32_MHz() const { return ghz_to_mhz(linear(ka32)); }
    double ka41_MHz() const { return ghz_to_mhz(linear(ka41)); }
    double ka42_MHz() const { return ghz_to_mhz(linear(ka42)); }
    double kb51_MHz() const { return ghz_to_mhz(linear(kb51)); }
    double kb52_MHz() const { return ghz_to_mhz(linear(kb52)); }
    double kb61_MHz() const { return ghz_to_mhz(linear(kb61)); }
    double kb62_MHz() const { return ghz_to_mhz(linear(kb62)); }
};

DecayTable decay_table(const DressedSpectrum& spec, const DispersiveParams& dp);

struct MatchOptions {
    double bracket_lo_MHz = 0.1;
    double bracket_hi_MHz = 40.0;
    double tol_MHz = 1e-3;  // 1 kHz
};

// Drive amplitude (MHz) at which the two decay paths out of level 3 equalize,
// located by bisection on ka31 - ka32. The equivalent angle condition
// theta_12 + theta_34 = pi/4 is verified on the result as a cross-check.
double find_impedance_match(const DispersiveParams& dp, double omega_d_GHz,
                            const MatchOptions& opts = {});

// Lab-frame transition frequencies between labeled levels, GHz. Resonator
// transitions are direct eigenvalue differences (signal/probe photon
// frequencies); the qubit transition 2->1 adds the drive rotation back.
struct TransitionFrequencies {
    double w31 = 0, w41 = 0, w51 = 0, w61 = 0, w21 = 0;  // GHz
};

TransitionFrequencies transition_frequencies(const DressedSpectrum& spec);

// Projector onto the excited-qubit dressed branch of the zero-a-photon
// sector: for every n_b, the eigenstate of the (n_a=0, n_b) block with
// dominant bare-excited content. This is the detector's "qubit excited"
// observable; with the probe off it reduces to the projector onto level 2.
Eigen::MatrixXcd qubit_excited_projector(const DispersiveParams& dp, const DriveSpec& drive);

}  // namespace lscope
