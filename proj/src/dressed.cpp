#include "lscope/dressed.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lscope/errors.hpp"

namespace lscope {

Eigen::MatrixXcd DressedSpectrum::projector(int label) const {
    const auto& v = ket(label);
    return v * v.adjoint();
}

DressedSpectrum diagonalize_dressed(const HamiltonianMatrix& h) {
    if (h.frame.res_a != 0.0 || h.frame.res_b != 0.0) {
        throw ConfigError(
            "dressed labeling requires the qubit-only frame (no resonator rotations)");
    }
    const double herm = (h.matrix - h.matrix.adjoint()).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, h.matrix.cwiseAbs().maxCoeff());
    if (herm > 1e-12 * scale) {
        throw ConfigError("Hamiltonian is not Hermitian to 1e-12 relative");
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h.matrix);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eigendecomposition failed");
    }
    const auto& evals = solver.eigenvalues();
    const auto& evecs = solver.eigenvectors();

    const BasisLayout& b = h.basis;
    // Bare manifold states, one dressed partner each.
    const std::array<int, 6> bare = {
        b.index(0, 0, 0), b.index(1, 0, 0), b.index(1, 1, 0),
        b.index(0, 1, 0), b.index(0, 0, 1), b.index(1, 0, 1),
    };

    struct Pick {
        int col = -1;
        double weight = 0.0;
    };
    std::array<Pick, 6> picks;
    for (int m = 0; m < 6; ++m) {
        for (int c = 0; c < evecs.cols(); ++c) {
            const double w = std::norm(evecs(bare[m], c));
            if (w > picks[m].weight) picks[m] = {c, w};
        }
        if (picks[m].weight <= 0.5) {
            std::ostringstream err;
            err << "no dressed state with dominant overlap (> 0.5) on bare state #" << m
                << "; best weight " << picks[m].weight;
            throw DegeneracyError(err.str());
        }
    }
    for (int m = 0; m < 6; ++m)
        for (int n = m + 1; n < 6; ++n)
            if (picks[m].col == picks[n].col) {
                std::ostringstream err;
                err << "dressed labeling ambiguous: bare states #" << m << " and #" << n
                    << " share eigenvector column " << picks[m].col;
                throw DegeneracyError(err.str());
            }

    DressedSpectrum spec;
    spec.basis = b;
    spec.drive = h.drive;

    std::array<int, 6> order = {0, 1, 2, 3, 4, 5};
    std::sort(order.begin(), order.end(), [&](int x, int y) {
        return evals(picks[x].col) < evals(picks[y].col);
    });
    constexpr double kTieEps = 1e-9;  // rad/ns
    for (int k = 0; k + 1 < 6; ++k) {
        const double e0 = evals(picks[order[k]].col);
        const double e1 = evals(picks[order[k + 1]].col);
        if (std::abs(e1 - e0) < kTieEps) {
            std::ostringstream err;
            err << "degenerate manifold eigenvalues for labels " << (k + 1) << " and "
                << (k + 2) << ": " << e0 << " vs " << e1 << " rad/ns";
            throw DegeneracyError(err.str());
        }
    }
    for (int k = 0; k < 6; ++k) {
        const auto& p = picks[order[k]];
        spec.energy[k] = evals(p.col);
        spec.state[k] = evecs.col(p.col);
        spec.dominant_weight[k] = p.weight;
    }

    // Mixing angles from eigenvector components:
    //   |1> = cos(t12)|g00> - sin(t12)|e00>
    //   |3> = cos(t34)|e10> - sin(t34)|g10>
    //   |5> = cos(t56)|g01> - sin(t56)|e01>
    auto angle = [&](const Eigen::VectorXcd& v, int cos_idx, int sin_idx) {
        return std::atan2(std::abs(v(sin_idx)), std::abs(v(cos_idx)));
    };
    spec.theta_12 = angle(spec.ket(1), b.index(0, 0, 0), b.index(1, 0, 0));
    spec.theta_34 = angle(spec.ket(3), b.index(1, 1, 0), b.index(0, 1, 0));
    spec.theta_56 = angle(spec.ket(5), b.index(0, 0, 1), b.index(1, 0, 1));
    return spec;
}

DecayTable decay_table(const DressedSpectrum& spec, const DispersiveParams& dp) {
    const Eigen::MatrixXcd adag = op_a_dag(spec.basis).dense();
    const Eigen::MatrixXcd bdag = op_b_dag(spec.basis).dense();
    auto rate = [&](const Eigen::MatrixXcd& xdag, double kappa, int j, int i) {
        const cplx amp = spec.ket(j).adjoint() * (xdag * spec.ket(i));
        return kappa * std::norm(amp);
    };
    DecayTable t;
    const double ka = dp.kappa_a_ang();
    const double kb = dp.kappa_b_ang();
    t.ka31 = rate(adag, ka, 3, 1);
    t.ka32 = rate(adag, ka, 3, 2);
    t.ka41 = rate(adag, ka, 4, 1);
    t.ka42 = rate(adag, ka, 4, 2);
    t.kb51 = rate(bdag, kb, 5, 1);
    t.kb52 = rate(bdag, kb, 5, 2);
    t.kb61 = rate(bdag, kb, 6, 1);
    t.kb62 = rate(bdag, kb, 6, 2);
    return t;
}

double find_impedance_match(const DispersiveParams& dp, double omega_d_GHz,
                            const MatchOptions& opts) {
    require_nesting(dp, omega_d_GHz);
    auto imbalance = [&](double Omega_MHz) {
        const DriveSpec drive{omega_d_GHz, Omega_MHz};
        const auto spec = diagonalize_dressed(build_hamiltonian(dp, drive, FrameSpec{}));
        const auto t = decay_table(spec, dp);
        return t.ka31 - t.ka32;
    };
    double lo = opts.bracket_lo_MHz;
    double hi = opts.bracket_hi_MHz;
    double flo = imbalance(lo);
    double fhi = imbalance(hi);
    if (flo * fhi > 0.0) {
        std::ostringstream err;
        err << "no sign change of ka31 - ka32 on [" << lo << ", " << hi
            << "] MHz; widen the bracket (drive may be too far from omega_q - 2 chi_a)";
        throw ConfigError(err.str());
    }
    while (hi - lo > opts.tol_MHz) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = imbalance(mid);
        if (fmid == 0.0) {
            lo = hi = mid;
            break;
        }
        if (flo * fmid < 0.0) {
            hi = mid;
            fhi = fmid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    const double root = 0.5 * (lo + hi);

    // Angle-sum cross-check on the result.
    const auto spec =
        diagonalize_dressed(build_hamiltonian(dp, DriveSpec{omega_d_GHz, root}, FrameSpec{}));
    const double angle_sum = spec.theta_12 + spec.theta_34;
    if (std::abs(angle_sum - kTwoPi / 8.0) > 1e-3) {
        std::ostringstream err;
        err << "impedance-match cross-check failed: theta_12 + theta_34 = " << angle_sum
            << " rad, expected pi/4";
        throw ConvergenceError(err.str());
    }
    return root;
}

TransitionFrequencies transition_frequencies(const DressedSpectrum& spec) {
    auto diff_GHz = [&](int j, int i) { return linear(spec.energy_of(j) - spec.energy_of(i)); };
    TransitionFrequencies t;
    t.w31 = diff_GHz(3, 1);
    t.w41 = diff_GHz(4, 1);
    t.w51 = diff_GHz(5, 1);
    t.w61 = diff_GHz(6, 1);
    t.w21 = diff_GHz(2, 1) + spec.drive.omega_d;
    return t;
}

Eigen::MatrixXcd qubit_excited_projector(const DispersiveParams& dp, const DriveSpec& drive) {
    const BasisLayout b{dp.n_a_max, dp.n_b_max};
    const int D = b.dim();
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(D, D);
    const double rabi = drive.Omega_d_ang();
    const double wq = dp.omega_q_ang() - drive.omega_d_ang();
    const double wb = dp.omega_b_ang();
    const double cb = dp.chi_b_ang();
    for (int nb = 0; nb <= b.n_b_max; ++nb) {
        Eigen::Matrix2d block;
        block << wb * nb, rabi, rabi, wq + (wb - 2.0 * cb) * nb;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(block);
        // column of the eigenvector with dominant excited (second) component
        const int col = std::abs(es.eigenvectors()(1, 0)) > std::abs(es.eigenvectors()(1, 1)) ? 0 : 1;
        const int ig = b.index(0, 0, nb);
        const int ie = b.index(1, 0, nb);
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(D);
        v(ig) = es.eigenvectors()(0, col);
        v(ie) = es.eigenvectors()(1, col);
        P += v * v.adjoint();
    }
    return P;
}

}  // namespace lscope
