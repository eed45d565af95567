#pragma once

#include "circtrace/discrete_op.hpp"

#include <cstdint>
#include <random>

namespace th {

using ct::cplx;
using ct::Mat;

struct Rng {
    std::mt19937_64 g;
    explicit Rng(std::uint64_t s) : g(s) {}
    double u() { return double(g() >> 11) * 0x1.0p-53; }
    double sym() { return 2.0 * u() - 1.0; }
    cplx c() { return {sym(), sym()}; }
    int pick(int n) { return int(g() % std::uint64_t(n)); }
};

inline ct::MatrixTrigPoly mono(int k, cplx v) { return ct::MatrixTrigPoly::monomial(k, Mat::Constant(1, 1, v)); }

inline ct::MatrixTrigPoly random_mtp(Rng& r, int d, int K) {
    ct::MatrixTrigPoly f(d, K);
    for (int k = -K; k <= K; ++k) {
        Mat m(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) m(i, j) = r.c() / (1.0 + std::abs(k));
        f.set(k, m);
    }
    return f;
}

inline ct::PhgSymbol random_symbol(Rng& r, double order, int d, int K, int terms = 3) {
    ct::PhgSymbol s(order, ct::kDefaultDepth, d);
    for (int j = 0; j < terms; ++j) s.add_term(j, 0, random_mtp(r, d, K), random_mtp(r, d, K));
    return s;
}

inline ct::Patch random_patch(Rng& r, int d, int support, int entries) {
    ct::Patch p(d);
    for (int e = 0; e < entries; ++e) {
        Mat m(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) m(i, j) = r.c();
        p.add(r.pick(2 * support + 1) - support, r.pick(2 * support + 1) - support, m);
    }
    return p;
}

inline ct::DiscreteOp hardy_up() {
    return ct::DiscreteOp(ct::PhgSymbol::term(0.0, mono(1, 1.0), ct::MatrixTrigPoly(1, 0)));
}
inline ct::DiscreteOp hardy_down() {
    return ct::DiscreteOp(ct::PhgSymbol::term(0.0, mono(-1, 1.0), ct::MatrixTrigPoly(1, 0)));
}

// max |entry| of A on modes |m|, |n| <= N
inline double max_entry(const ct::DiscreteOp& A, int N) {
    double w = 0.0;
    for (int n = -N; n <= N; ++n)
        for (int m = -N; m <= N; ++m) w = std::max(w, A.entry(m, n).cwiseAbs().maxCoeff());
    return w;
}

}  // namespace th
