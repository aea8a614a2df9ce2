#include "lscope/lindblad.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/SparseLU>

#include "lscope/dressed.hpp"
#include "lscope/errors.hpp"
#include "lscope/parallel.hpp"

namespace lscope {

namespace {

// K accumulates -iH; the anticommutator halves of the dissipators live on its
// diagonal since all collapse operators here have diagonal L†L.
void add_drive_lines(const BasisLayout& basis, const std::vector<CoherentDrive>& drives,
                     double kappa_a, double kappa_b, std::vector<LineOp>& lines) {
    for (const auto& d : drives) {
        if (d.target != 'a' && d.target != 'b') {
            throw ConfigError("coherent drive target must be 'a' or 'b'");
        }
        const double kappa = d.target == 'a' ? kappa_a : kappa_b;
        const LineOp up = d.target == 'a' ? op_a_dag(basis) : op_b_dag(basis);
        const LineOp dn = d.target == 'a' ? op_a(basis) : op_b(basis);
        const double root = std::sqrt(kappa);
        // -i * i sqrt(k) (amp x† - amp* x) = sqrt(k) amp x† - sqrt(k) amp* x
        lines.push_back(up.scaled(root * d.amplitude));
        lines.push_back(dn.scaled(-root * std::conj(d.amplitude)));
    }
}

}  // namespace

Liouvillian::Liouvillian(const DispersiveParams& dp, const DriveSpec& drive,
                         const FrameSpec& frame, const std::vector<CoherentDrive>& drives)
    : dp_(dp), drive_(drive), frame_(frame), drives_(drives) {
    const BasisLayout basis{dp.n_a_max, dp.n_b_max};
    gen_.basis = basis;

    const auto hdiag = hamiltonian_diagonal(dp, drive, frame, basis);
    const double ka = dp.kappa_a_ang();
    const double kb = dp.kappa_b_ang();
    const double g = dp.gamma_ang();
    gen_.k_diag.resize(basis.dim());
    for (int i = 0; i < basis.dim(); ++i) {
        const double loss =
            0.5 * (ka * basis.na_of(i) + kb * basis.nb_of(i) + g * basis.q_of(i));
        gen_.k_diag[i] = cplx(-loss, -hdiag[i]);
    }

    const double rabi = drive.Omega_d_ang();
    if (rabi != 0.0) {
        gen_.k_lines.push_back(op_sigma_dag(basis).scaled(cplx(0.0, -rabi)));
        gen_.k_lines.push_back(op_sigma(basis).scaled(cplx(0.0, -rabi)));
    }
    add_drive_lines(basis, drives, ka, kb, gen_.k_lines);

    gen_.jumps.push_back(op_a(basis).scaled(std::sqrt(ka)));
    gen_.jumps.push_back(op_b(basis).scaled(std::sqrt(kb)));
    gen_.jumps.push_back(op_sigma(basis).scaled(std::sqrt(g)));
    gen_.finalize();
}

Eigen::MatrixXcd Liouvillian::apply(const Eigen::MatrixXcd& rho) const {
    const int D = dim();
    Eigen::MatrixXcd out(D, D);
    // Row-major kernels on column-major Eigen data compute the transposed
    // generator action; the generator commutes with transposition only for
    // symmetric structure, so keep it simple: copy through row-major buffers.
    std::vector<cplx> rin(std::size_t(D) * D), rout(std::size_t(D) * D);
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) rin[std::size_t(i) * D + j] = rho(i, j);
    gen_.apply(rin.data(), rout.data());
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) out(i, j) = rout[std::size_t(i) * D + j];
    return out;
}

Eigen::MatrixXcd Liouvillian::hamiltonian() const {
    // H = i K_offdiag ... reconstruct directly instead: diagonal + drive lines.
    const int D = dim();
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(D, D);
    const auto hdiag = hamiltonian_diagonal(dp_, drive_, frame_, gen_.basis);
    for (int i = 0; i < D; ++i) H(i, i) = hdiag[i];
    const double rabi = drive_.Omega_d_ang();
    if (rabi != 0.0)
        H += rabi * (op_sigma_dag(gen_.basis).dense() + op_sigma(gen_.basis).dense());
    for (const auto& d : drives_) {
        const double kappa = d.target == 'a' ? dp_.kappa_a_ang() : dp_.kappa_b_ang();
        const Eigen::MatrixXcd x =
            d.target == 'a' ? op_a(gen_.basis).dense() : op_b(gen_.basis).dense();
        H += cplx(0.0, 1.0) * std::sqrt(kappa) *
             (d.amplitude * x.adjoint() - std::conj(d.amplitude) * x);
    }
    return H;
}

Eigen::SparseMatrix<cplx> Liouvillian::superoperator() const {
    const int D = dim();
    const Eigen::MatrixXcd K = gen_.k_dense();
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(std::size_t(D) * D * 12);
    auto vec_idx = [D](int row, int col) { return row + D * col; };  // column-major vec
    // vec(K rho) = (I ⊗ K) vec, vec(rho K†) = (conj(K) ⊗ I) vec
    for (int i = 0; i < D; ++i) {
        for (int j = 0; j < D; ++j) {
            const cplx k = K(i, j);
            if (k == cplx(0.0)) continue;
            for (int c = 0; c < D; ++c) {
                trip.emplace_back(vec_idx(i, c), vec_idx(j, c), k);          // K rho
                trip.emplace_back(vec_idx(c, i), vec_idx(c, j), std::conj(k));  // rho K†
            }
        }
    }
    for (const auto& jop : gen_.jumps) {
        for (int i = 0; i < D; ++i) {
            if (jop.src[i] < 0) continue;
            for (int j = 0; j < D; ++j) {
                if (jop.src[j] < 0) continue;
                trip.emplace_back(vec_idx(i, j), vec_idx(jop.src[i], jop.src[j]),
                                  jop.w[i] * std::conj(jop.w[j]));
            }
        }
    }
    Eigen::SparseMatrix<cplx> M(D * D, D * D);
    M.setFromTriplets(trip.begin(), trip.end());
    return M;
}

Eigen::MatrixXcd steady_state(const Liouvillian& liou) {
    const int D = liou.dim();
    Eigen::SparseMatrix<cplx> M = liou.superoperator();

    // Replace the rho_00 equation with the trace constraint.
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(M.nonZeros() + D);
    for (int k = 0; k < M.outerSize(); ++k) {
        for (Eigen::SparseMatrix<cplx>::InnerIterator it(M, k); it; ++it) {
            if (it.row() == 0) continue;
            trip.emplace_back(it.row(), it.col(), it.value());
        }
    }
    for (int i = 0; i < D; ++i) trip.emplace_back(0, i + D * i, cplx(1.0));
    Eigen::SparseMatrix<cplx> A(D * D, D * D);
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<cplx>> solver;
    solver.analyzePattern(A);
    solver.factorize(A);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error(
            "steady-state solve failed: stationary manifold appears degenerate");
    }
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(D * D);
    rhs(0) = 1.0;
    const Eigen::VectorXcd x = solver.solve(rhs);

    Eigen::MatrixXcd rho(D, D);
    for (int c = 0; c < D; ++c) rho.col(c) = x.segment(std::size_t(c) * D, D);
    rho = 0.5 * (rho + rho.adjoint()).eval();

    const double residual = liou.apply(rho).norm();
    if (!(residual < 1e-10)) {
        std::ostringstream err;
        err << "steady-state residual " << residual
            << " exceeds 1e-10; stationary state may be non-unique";
        throw std::runtime_error(err.str());
    }
    return rho;
}

cplx reflection_coefficient(const DispersiveParams& dp, const DriveSpec& drive,
                            double omega_s_GHz, const ReflectionOptions& opts) {
    const double flux = opts.flux.value_or(1e-3 * dp.gamma_ang());
    const double alpha = std::sqrt(flux);
    // Frame: qubit at omega_d, resonator A at the signal tone; B is undriven,
    // rotating it at its own frequency just keeps the generator well scaled.
    const FrameSpec frame{omega_s_GHz, dp.omega_b};
    Liouvillian liou(dp, drive, frame, {CoherentDrive{'a', alpha}});
    const Eigen::MatrixXcd rho = steady_state(liou);
    const Eigen::MatrixXcd a = op_a(liou.basis()).dense();
    const double na = std::real((dense_number_a(liou.basis()) * rho).trace());
    if (na > opts.max_na) {
        std::ostringstream err;
        err << "weak-drive precondition violated: steady <a'a> = " << na << " exceeds "
            << opts.max_na;
        throw ConfigError(err.str());
    }
    const cplx a_ss = (a * rho).trace();
    return 1.0 - std::sqrt(dp.kappa_a_ang()) * a_ss / alpha;
}

std::vector<ReflectionPoint> reflection_map(const DispersiveParams& dp, double omega_d_GHz,
                                            const std::vector<double>& Omega_d_MHz,
                                            const std::vector<double>& omega_s_GHz,
                                            int workers) {
    std::vector<ReflectionPoint> out(Omega_d_MHz.size() * omega_s_GHz.size());
    const int ns = static_cast<int>(omega_s_GHz.size());
    parallel_for(static_cast<int>(out.size()), workers, [&](int idx) {
        const double Om = Omega_d_MHz[idx / ns];
        const double ws = omega_s_GHz[idx % ns];
        const DriveSpec drive{omega_d_GHz, Om};
        ReflectionPoint p;
        p.Omega_d_MHz = Om;
        p.omega_s_GHz = ws;
        try {
            p.r = reflection_coefficient(dp, drive, ws);
        } catch (const std::exception& e) {
            std::ostringstream err;
            err << "reflection grid point (Omega_d=" << Om << " MHz, omega_s=" << ws
                << " GHz): " << e.what();
            throw std::runtime_error(err.str());
        }
        const auto spec = diagonalize_dressed(build_hamiltonian(dp, drive, FrameSpec{}));
        const auto tf = transition_frequencies(spec);
        p.w31_GHz = tf.w31;
        p.w41_GHz = tf.w41;
        out[idx] = p;
    });
    return out;
}

}  // namespace lscope
