#include "lscope/operators.hpp"

#include <cmath>

namespace lscope {

LineOp LineOp::scaled(cplx factor) const {
    LineOp out = *this;
    for (auto& x : out.w) x *= factor;
    return out;
}

Eigen::MatrixXcd LineOp::dense() const {
    const int D = dim();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(D, D);
    for (int i = 0; i < D; ++i)
        if (src[i] >= 0) m(i, src[i]) = w[i];
    return m;
}

LineOp adjoint(const LineOp& op) {
    const int D = op.dim();
    LineOp out;
    out.src.assign(D, -1);
    out.w.assign(D, cplx(0.0));
    for (int i = 0; i < D; ++i) {
        if (op.src[i] >= 0) {
            out.src[op.src[i]] = i;
            out.w[op.src[i]] = std::conj(op.w[i]);
        }
    }
    return out;
}

namespace {

template <typename SrcFn>
LineOp make_line(const BasisLayout& b, SrcFn fn) {
    const int D = b.dim();
    LineOp op;
    op.src.assign(D, -1);
    op.w.assign(D, cplx(0.0));
    for (int i = 0; i < D; ++i) {
        auto [j, w] = fn(i);
        op.src[i] = j;
        op.w[i] = w;
    }
    return op;
}

}  // namespace

LineOp op_a(const BasisLayout& b) {
    // a|n> = sqrt(n)|n-1>: row (.., na, ..) reads column (.., na+1, ..)
    return make_line(b, [&](int i) -> std::pair<int, cplx> {
        const int na = b.na_of(i);
        if (na + 1 > b.n_a_max) return {-1, 0.0};
        return {i + b.stride_a(), std::sqrt(double(na + 1))};
    });
}

LineOp op_a_dag(const BasisLayout& b) {
    return make_line(b, [&](int i) -> std::pair<int, cplx> {
        const int na = b.na_of(i);
        if (na == 0) return {-1, 0.0};
        return {i - b.stride_a(), std::sqrt(double(na))};
    });
}

LineOp op_b(const BasisLayout& b) {
    return make_line(b, [&](int i) -> std::pair<int, cplx> {
        const int nb = b.nb_of(i);
        if (nb + 1 > b.n_b_max) return {-1, 0.0};
        return {i + b.stride_b(), std::sqrt(double(nb + 1))};
    });
}

LineOp op_b_dag(const BasisLayout& b) {
    return make_line(b, [&](int i) -> std::pair<int, cplx> {
        const int nb = b.nb_of(i);
        if (nb == 0) return {-1, 0.0};
        return {i - b.stride_b(), std::sqrt(double(nb))};
    });
}

LineOp op_sigma(const BasisLayout& b) {
    return make_line(b, [&](int i) -> std::pair<int, cplx> {
        if (b.q_of(i) != 0) return {-1, 0.0};
        return {i + b.stride_q(), 1.0};
    });
}

LineOp op_sigma_dag(const BasisLayout& b) {
    return make_line(b, [&](int i) -> std::pair<int, cplx> {
        if (b.q_of(i) != 1) return {-1, 0.0};
        return {i - b.stride_q(), 1.0};
    });
}

Eigen::MatrixXcd dense_number_a(const BasisLayout& b) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(b.dim(), b.dim());
    for (int i = 0; i < b.dim(); ++i) m(i, i) = double(b.na_of(i));
    return m;
}

Eigen::MatrixXcd dense_number_b(const BasisLayout& b) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(b.dim(), b.dim());
    for (int i = 0; i < b.dim(); ++i) m(i, i) = double(b.nb_of(i));
    return m;
}

std::vector<double> hamiltonian_diagonal(const DispersiveParams& dp, const DriveSpec& drive,
                                         const FrameSpec& frame, const BasisLayout& basis) {
    const int D = basis.dim();
    std::vector<double> diag(D);
    const double wa = dp.omega_a_ang();
    const double wb = dp.omega_b_ang();
    const double wq = dp.omega_q_ang();
    const double wd = drive.omega_d_ang();
    const double ca = dp.chi_a_ang();
    const double cb = dp.chi_b_ang();
    const double fa = angular(frame.res_a);
    const double fb = angular(frame.res_b);
    for (int i = 0; i < D; ++i) {
        const int q = basis.q_of(i);
        const int na = basis.na_of(i);
        const int nb = basis.nb_of(i);
        double e;
        if (q == 0) {
            e = wa * na + wb * nb;
        } else {
            e = (wq - wd) + (wa - 2.0 * ca) * na + (wb - 2.0 * cb) * nb;
        }
        diag[i] = e - fa * na - fb * nb;
    }
    return diag;
}

HamiltonianMatrix build_hamiltonian(const DispersiveParams& dp, const DriveSpec& drive,
                                    const FrameSpec& frame) {
    BasisLayout basis{dp.n_a_max, dp.n_b_max};
    const int D = basis.dim();
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(D, D);
    const auto diag = hamiltonian_diagonal(dp, drive, frame, basis);
    for (int i = 0; i < D; ++i) H(i, i) = diag[i];
    const double rabi = drive.Omega_d_ang();
    if (rabi != 0.0) {
        H += rabi * (op_sigma_dag(basis).dense() + op_sigma(basis).dense());
    }
    return HamiltonianMatrix{std::move(H), basis, frame, drive};
}

namespace kernel {

void add_line_left(int D, const LineOp& op, cplx scale, const cplx* rho, cplx* out) {
    for (int i = 0; i < D; ++i) {
        const int s = op.src[i];
        if (s < 0) continue;
        const cplx c = scale * op.w[i];
        const cplx* rrow = rho + std::size_t(s) * D;
        cplx* orow = out + std::size_t(i) * D;
        for (int j = 0; j < D; ++j) orow[j] += c * rrow[j];
    }
}

void add_line_right(int D, const LineOp& op, cplx scale, const cplx* rho, cplx* out) {
    // (rho O)[i, src_k] += rho[i, k] w_k
    for (int i = 0; i < D; ++i) {
        const cplx* rrow = rho + std::size_t(i) * D;
        cplx* orow = out + std::size_t(i) * D;
        for (int k = 0; k < D; ++k) {
            const int s = op.src[k];
            if (s < 0) continue;
            orow[s] += scale * op.w[k] * rrow[k];
        }
    }
}

void add_diag_left(int D, const std::vector<cplx>& d, const cplx* rho, cplx* out) {
    for (int i = 0; i < D; ++i) {
        const cplx c = d[i];
        const cplx* rrow = rho + std::size_t(i) * D;
        cplx* orow = out + std::size_t(i) * D;
        for (int j = 0; j < D; ++j) orow[j] += c * rrow[j];
    }
}

void add_diag_right_conj(int D, const std::vector<cplx>& d, const cplx* rho, cplx* out) {
    for (int i = 0; i < D; ++i) {
        const cplx* rrow = rho + std::size_t(i) * D;
        cplx* orow = out + std::size_t(i) * D;
        for (int j = 0; j < D; ++j) orow[j] += std::conj(d[j]) * rrow[j];
    }
}

void add_sandwich(int D, const LineOp& op, const cplx* rho, cplx* out) {
    for (int i = 0; i < D; ++i) {
        const int si = op.src[i];
        if (si < 0) continue;
        const cplx wi = op.w[i];
        const cplx* rrow = rho + std::size_t(si) * D;
        cplx* orow = out + std::size_t(i) * D;
        for (int j = 0; j < D; ++j) {
            const int sj = op.src[j];
            if (sj < 0) continue;
            orow[j] += wi * std::conj(op.w[j]) * rrow[sj];
        }
    }
}

}  // namespace kernel

void Generator::finalize() {
    k_lines_adj.clear();
    k_lines_adj.reserve(k_lines.size());
    for (const auto& l : k_lines) k_lines_adj.push_back(adjoint(l));
}

void Generator::apply(const cplx* rho, cplx* out) const {
    const int D = basis.dim();
    std::fill(out, out + std::size_t(D) * D, cplx(0.0));
    kernel::add_diag_left(D, k_diag, rho, out);
    kernel::add_diag_right_conj(D, k_diag, rho, out);
    for (std::size_t n = 0; n < k_lines.size(); ++n) {
        kernel::add_line_left(D, k_lines[n], 1.0, rho, out);
        kernel::add_line_right(D, k_lines_adj[n], 1.0, rho, out);
    }
    for (const auto& j : jumps) kernel::add_sandwich(D, j, rho, out);
}

Eigen::MatrixXcd Generator::k_dense() const {
    const int D = basis.dim();
    Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(D, D);
    for (int i = 0; i < D; ++i) K(i, i) = k_diag[i];
    for (const auto& l : k_lines) K += l.dense();
    return K;
}

}  // namespace lscope
