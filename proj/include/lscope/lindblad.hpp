#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "lscope/operators.hpp"
#include "lscope/params.hpp"

namespace lscope {

// Classical input tone on a resonator port. The Hamiltonian contribution is
// i sqrt(kappa) (amp x_dag - conj(amp) x); amp is the input flux amplitude in
// sqrt(photons/ns), assumed static in the chosen rotating frame.
struct CoherentDrive {
    char target = 'a';  // 'a' or 'b'
    cplx amplitude = 0.0;
};

// Lindblad generator for the driven dispersive system with collapse channels
// sqrt(kappa_a) a, sqrt(kappa_b) b, sqrt(gamma) sigma. The frame must rotate
// each coherently driven resonator at its tone frequency so the generator is
// time independent.
class Liouvillian {
  public:
    Liouvillian(const DispersiveParams& dp, const DriveSpec& drive, const FrameSpec& frame,
                const std::vector<CoherentDrive>& drives = {});

    const BasisLayout& basis() const { return gen_.basis; }
    int dim() const { return gen_.basis.dim(); }
    const Generator& generator() const { return gen_; }
    const DispersiveParams& params() const { return dp_; }
    const FrameSpec& frame() const { return frame_; }

    // d(rho)/dt, reference path (Eigen matrices, same kernels underneath).
    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const;

    // Dense Hamiltonian including the coherent drive terms, rad/ns.
    Eigen::MatrixXcd hamiltonian() const;

    // Vectorized generator (column-major vec), D^2 x D^2 sparse.
    Eigen::SparseMatrix<cplx> superoperator() const;

  private:
    Generator gen_;
    DispersiveParams dp_;
    DriveSpec drive_;
    FrameSpec frame_;
    std::vector<CoherentDrive> drives_;
};

// Unique stationary state via a direct sparse solve of the vectorized
// generator with one row replaced by the trace constraint. Throws if the
// solve fails or the generator residual on the solution exceeds 1e-10.
Eigen::MatrixXcd steady_state(const Liouvillian& liou);

struct ReflectionOptions {
    // Input flux |alpha|^2 in photons/ns; default is far below the slow qubit
    // relaxation scale so the drive stays in linear response.
    std::optional<double> flux;
    double max_na = 0.01;  // weak-drive guard on steady <a'a>
};

// Elastic reflection amplitude of a continuous signal on resonator A:
// r = 1 - sqrt(kappa_a) <a>_ss / alpha with drive i sqrt(kappa_a)(alpha a_dag - ...).
// Probe off, qubit drive on. For the bare cavity this convention gives
// r(Delta) = (i Delta - kappa/2)/(i Delta + kappa/2).
cplx reflection_coefficient(const DispersiveParams& dp, const DriveSpec& drive,
                            double omega_s_GHz, const ReflectionOptions& opts = {});

struct ReflectionPoint {
    double Omega_d_MHz = 0.0;
    double omega_s_GHz = 0.0;
    cplx r;
    double w31_GHz = 0.0;  // transition-frequency overlays at this drive power
    double w41_GHz = 0.0;
};

std::vector<ReflectionPoint> reflection_map(const DispersiveParams& dp, double omega_d_GHz,
                                            const std::vector<double>& Omega_d_MHz,
                                            const std::vector<double>& omega_s_GHz,
                                            int workers = 1);

}  // namespace lscope
