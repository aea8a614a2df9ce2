#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "lscope/basis.hpp"
#include "lscope/params.hpp"

namespace lscope {

using cplx = std::complex<double>;

// Operator with at most one nonzero per row: O[i, src[i]] = w[i], src[i] < 0
// for an empty row. All ladder/flip operators in the product basis have this
// shape, which keeps the generator application at a handful of O(D^2) passes.
struct LineOp {
    std::vector<int> src;
    std::vector<cplx> w;

    int dim() const { return static_cast<int>(src.size()); }
    LineOp scaled(cplx factor) const;
    Eigen::MatrixXcd dense() const;
};

// Adjoint of a single-line operator is again single-line (ladder shifts are
// injective on the retained rows).
LineOp adjoint(const LineOp& op);

// Annihilation/creation and qubit flip operators.
LineOp op_a(const BasisLayout& b);
LineOp op_a_dag(const BasisLayout& b);
LineOp op_b(const BasisLayout& b);
LineOp op_b_dag(const BasisLayout& b);
LineOp op_sigma(const BasisLayout& b);      // |g><e|
LineOp op_sigma_dag(const BasisLayout& b);  // |e><g|

Eigen::MatrixXcd dense_number_a(const BasisLayout& b);
Eigen::MatrixXcd dense_number_b(const BasisLayout& b);

// Rotating-frame rotation frequencies (linear GHz). The driven Hamiltonian
// conserves both photon numbers, so resonator rotations only shift the
// diagonal; the qubit is always rotated at the drive frequency.
struct FrameSpec {
    double res_a = 0.0;  // GHz, 0 = no rotation
    double res_b = 0.0;  // GHz
};

// Diagonal of the driven dispersive Hamiltonian in the rotating frame, rad/ns.
// Ground-qubit rows carry omega_a n_a + omega_b n_b; excited rows carry
// (omega_q - omega_d) + (omega_a - 2 chi_a) n_a + (omega_b - 2 chi_b) n_b;
// frame rotations subtract frame.res_r * n_r from both.
std::vector<double> hamiltonian_diagonal(const DispersiveParams& dp, const DriveSpec& drive,
                                         const FrameSpec& frame, const BasisLayout& basis);

struct HamiltonianMatrix {
    Eigen::MatrixXcd matrix;  // rad/ns
    BasisLayout basis;
    FrameSpec frame;
    DriveSpec drive;
};

// Dense Hamiltonian: diagonal above plus the drive term Omega_d (sigma† + sigma).
HamiltonianMatrix build_hamiltonian(const DispersiveParams& dp, const DriveSpec& drive,
                                    const FrameSpec& frame);

// Flat row-major D x D density-matrix kernels. All "line" passes touch each
// element once; rho and out must not alias.
namespace kernel {

// out += scale * O rho
void add_line_left(int D, const LineOp& op, cplx scale, const cplx* rho, cplx* out);
// out += scale * rho O
void add_line_right(int D, const LineOp& op, cplx scale, const cplx* rho, cplx* out);
// out += diag(d) rho  and  out += rho diag(d)† respectively
void add_diag_left(int D, const std::vector<cplx>& d, const cplx* rho, cplx* out);
void add_diag_right_conj(int D, const std::vector<cplx>& d, const cplx* rho, cplx* out);
// out += O rho O†
void add_sandwich(int D, const LineOp& op, const cplx* rho, cplx* out);

}  // namespace kernel

// Precompiled Lindblad generator: K = -iH - 1/2 sum L†L split into a diagonal
// and single-line off-diagonal pieces, plus the jump operators. apply() gives
// d(rho)/dt = K rho + rho K† + sum_c L_c rho L_c†.
struct Generator {
    BasisLayout basis;
    std::vector<cplx> k_diag;
    std::vector<LineOp> k_lines;
    std::vector<LineOp> k_lines_adj;  // adjoints, precomputed
    std::vector<LineOp> jumps;

    void finalize();  // fills k_lines_adj
    void apply(const cplx* rho, cplx* out) const;
    Eigen::MatrixXcd k_dense() const;
};

}  // namespace lscope
