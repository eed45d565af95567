#include "circtrace/kernels.hpp"
#include "circtrace/oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ct {

namespace {

void check_window(int N, int need, const char* who) {
    if (N < need)
        throw std::domain_error(std::string(who) + ": window too small (N = " + std::to_string(N) + ", need >= " +
                                std::to_string(need) + ")");
    if (N > kMaxDenseWindow)
        throw std::domain_error(std::string(who) + ": window beyond the dense cap " + std::to_string(kMaxDenseWindow));
}

int footprint(const DiscreteOp& A) { return A.bandwidth() + std::max(0, A.patch().support()); }

}  // namespace

LaurentData spectral_zeta_laurent(const DiscreteOp& A, const Weight& Q, int N) {
    int need = footprint(A);
    if (Q.has_gauge()) need += footprint(Q.gauge()) + footprint(Q.gauge_inverse());
    check_window(N, std::max(8, 4 * need), "spectral_zeta_laurent");

    // exact diagonal on the window
    std::vector<cplx> diag(2 * N + 1);
    PhgSymbol sym = A.symbol();
    if (!Q.has_gauge()) {
        ModeMatrix M(A, N);
        for (int n = -N; n <= N; ++n) diag[n + N] = M.diag_trace(n);
    } else {
        const DiscreteOp &C = Q.gauge(), &Ci = Q.gauge_inverse();
        const int Nb = N + 2 * (C.bandwidth() + Ci.bandwidth()) + A.bandwidth();
        ModeMatrix MC(C, Nb), MA(A, Nb), MCi(Ci, Nb);
        ModeMatrix P = MC * (MA * MCi);
        for (int n = -N; n <= N; ++n) diag[n + N] = P.block(n, n).trace();
        int d = std::min({A.depth(), C.depth(), Ci.depth()});
        sym = star_product(star_product(C.symbol(), A.symbol(), d), Ci.symbol(), d);
    }

    Series S(-3, 1);
    std::vector<double> w0(2 * N + 1), w1(2 * N + 1);
    for (int n = -N; n <= N; ++n) {
        w0[n + N] = 1.0;
        w1[n + N] = -std::log(Q.value(n));
    }
    S.at(0) += kernels::weighted_diag_sum_omp(diag, w0);
    S.at(1) += kernels::weighted_diag_sum_omp(diag, w1);

    DiagonalData D = diagonal_data(DiscreteOp(sym));
    PhgSymbol L = log_weight_remainder(Q.ungauged(), 64);
    std::vector<cplx> Lp(64, 0.0), Lm(64, 0.0);
    for (auto& t : L.terms())
        if (t.logpow == 0 && t.j < 64) {
            Lp[t.j] += t.plus.at(0, 0, 0);
            Lm[t.j] += t.minus.at(0, 0, 0);
        }
    S += dirichlet_tail(D.plus, Lp, Q.order(), N, 1);
    S += dirichlet_tail(D.minus, Lm, Q.order(), N, 1);

    LaurentData out;
    out.pole3 = S[-3];
    out.pole2 = S[-2];
    out.residue = S[-1];
    out.finite_part = S[0];
    out.linear = S[1];
    return out;
}

double brute_compose_check(const DiscreteOp& A, const DiscreteOp& B, int N, int depth) {
    check_window(N, std::max(8, 4 * (footprint(A) + footprint(B))), "brute_compose_check");
    ModeMatrix MA(A, N), MB(B, N);
    DiscreteOp C = compose(A, B, depth);
    ModeMatrix MC(C, N);
    const Mat P = kernels::matmul_omp(MA.matrix(), MB.matrix());
    const Mat R = kernels::matmul_omp(MA.matrix().cwiseAbs().cast<cplx>(), MB.matrix().cwiseAbs().cast<cplx>());
    const int inner = N - B.bandwidth();
    const int d = A.dim();
    const double eps = std::numeric_limits<double>::epsilon();
    double worst = 0.0;
    for (int n = -inner; n <= inner; ++n) {
        double tail = std::abs(n) > kExactWindow ? composition_tail_bound(A, B, depth, n) : 0.0;
        for (int m = -inner; m <= inner; ++m)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    Eigen::Index r = (m + N) * d + i, c = (n + N) * d + j;
                    double dev = std::abs(P(r, c) - MC.matrix()(r, c));
                    double allow = tail + 16.0 * eps * (std::abs(R(r, c)) + std::abs(MC.matrix()(r, c)));
                    worst = std::max(worst, dev - allow);
                }
    }
    return std::max(0.0, worst);
}

}  // namespace ct
