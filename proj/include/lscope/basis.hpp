#pragma once

namespace lscope {

// Product basis |q, n_a, n_b> with q in {0 (ground), 1 (excited)}.
// Row index = (q*(n_a_max+1) + n_a)*(n_b_max+1) + n_b, so n_b varies fastest.
struct BasisLayout {
    int n_a_max = 3;
    int n_b_max = 3;

    int da() const { return n_a_max + 1; }
    int db() const { return n_b_max + 1; }
    int dim() const { return 2 * da() * db(); }

    int index(int q, int na, int nb) const { return (q * da() + na) * db() + nb; }

    int q_of(int i) const { return i / (da() * db()); }
    int na_of(int i) const { return (i / db()) % da(); }
    int nb_of(int i) const { return i % db(); }

    // Index strides for the three quantum numbers.
    int stride_q() const { return da() * db(); }
    int stride_a() const { return db(); }
    int stride_b() const { return 1; }

    bool operator==(const BasisLayout&) const = default;
};

}  // namespace lscope
