#include "circtrace/geomforms.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ct {

int Loop::bandwidth() const { return std::max({c[0].bandwidth(), c[1].bandwidth(), c[2].bandwidth()}); }

Loop bracket(const Loop& a, const Loop& b) {
    Loop r;
    for (int i = 0; i < 3; ++i) {
        int j = (i + 1) % 3, k = (i + 2) % 3;
        r.c[i] = a.c[j] * b.c[k] - a.c[k] * b.c[j];
    }
    return r;
}

namespace {

Mat ad_matrix(const cplx v[3]) {
    Mat m = Mat::Zero(3, 3);
    m(0, 1) = -v[2];
    m(0, 2) = v[1];
    m(1, 0) = v[2];
    m(1, 2) = -v[0];
    m(2, 0) = -v[1];
    m(2, 1) = v[0];
    return m;
}

Mat ad_coeff(const Loop& V, int k) {
    cplx v[3] = {V.c[0].coeff(k), V.c[1].coeff(k), V.c[2].coeff(k)};
    return ad_matrix(v);
}

// (Q0 + pi0)^e on mode n, Q0 the Laplacian
double lam(int n, double e) { return n == 0 ? 1.0 : std::pow(double(n) * n, e); }

Loop scaled(const Loop& V, double e) {
    Loop r;
    for (int i = 0; i < 3; ++i) {
        int K = V.c[i].bandwidth();
        r.c[i] = TrigPoly(K);
        for (int k = -K; k <= K; ++k) r.c[i].set(k, V.c[i].coeff(k) * lam(k, e));
    }
    return r;
}

// block-banded dense storage on modes -N..N
struct Banded {
    int N, band;
    Mat M;
    Banded(int N_, int b) : N(N_), band(b), M(Mat::Zero(3 * (2 * N_ + 1), 3 * (2 * N_ + 1))) {}
    int at(int n) const { return 3 * (n + N); }
    auto blk(int m, int n) { return M.block(at(m), at(n), 3, 3); }
    auto blk(int m, int n) const { return M.block(at(m), at(n), 3, 3); }
};

Banded ad_dense(const Loop& V, int N) {
    const int b = V.bandwidth();
    Banded A(N, b);
    for (int n = -N; n <= N; ++n)
        for (int m = std::max(-N, n - b); m <= std::min(N, n + b); ++m) A.blk(m, n) = ad_coeff(V, m - n);
    return A;
}

Banded theta_dense(const Loop& V, double s, int sign, int N) {
    Banded A = ad_dense(V, N), T = ad_dense(scaled(V, sign * s), N);
    Banded out(N, A.band);
    for (int n = -N; n <= N; ++n)
        for (int m = std::max(-N, n - A.band); m <= std::min(N, n + A.band); ++m)
            out.blk(m, n) = 0.5 * (A.blk(m, n) + (lam(m, -s) * lam(n, s)) * A.blk(m, n) - lam(m, -s) * T.blk(m, n));
    return out;
}

Banded mul(const Banded& A, const Banded& B) {
    Banded C(A.N, A.band + B.band);
    const int N = A.N;
    for (int n = -N; n <= N; ++n)
        for (int k = std::max(-N, n - B.band); k <= std::min(N, n + B.band); ++k) {
            auto b = B.blk(k, n);
            if (b.cwiseAbs().maxCoeff() == 0.0) continue;
            for (int m = std::max(-N, k - A.band); m <= std::min(N, k + A.band); ++m) C.blk(m, n) += A.blk(m, k) * b;
        }
    return C;
}

ModeMatrix crop(const Banded& A, int N) {
    ModeMatrix out(N, 3);
    const int off = 3 * (A.N - N);
    out.matrix() = A.M.block(off, off, 3 * (2 * N + 1), 3 * (2 * N + 1));
    return out;
}

double slope_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

DiscreteOp ad_op(const Loop& V, int depth) {
    const int K = V.bandwidth();
    MatrixTrigPoly f(3, K);
    for (int k = -K; k <= K; ++k) f.set(k, ad_coeff(V, k));
    return DiscreteOp::multiplication(f, depth);
}

void accumulate(std::vector<DiscreteOp>& buckets, const DiscreteOp& x) {
    for (auto& b : buckets) {
        double d = b.order() - x.order();
        if (std::abs(d - std::round(d)) < 1e-12) {
            b = b + x;
            return;
        }
    }
    buckets.push_back(x);
}

}  // namespace

std::vector<DiscreteOp> freed_theta_parts(const Loop& V, double s, int sign, int depth) {
    DiscreteOp A = ad_op(V, depth), T = ad_op(scaled(V, sign * s), depth);
    DiscreteOp Lm = DiscreteOp::multiplier(PhgSymbol::power(-2.0 * s, 1.0, 3, depth), 1.0);
    DiscreteOp Lp = DiscreteOp::multiplier(PhgSymbol::power(2.0 * s, 1.0, 3, depth), 1.0);
    DiscreteOp conj = compose(compose(Lm, A, depth), Lp, depth);
    std::vector<DiscreteOp> parts;
    accumulate(parts, (A + conj) * cplx(0.5));
    accumulate(parts, compose(Lm, T, depth) * cplx(-0.5));
    return parts;
}

std::vector<DiscreteOp> freed_curvature_parts(const Loop& U, const Loop& V, double s, int sign, int depth) {
    auto tU = freed_theta_parts(U, s, sign, depth), tV = freed_theta_parts(V, s, sign, depth);
    std::vector<DiscreteOp> out;
    for (auto& a : tU)
        for (auto& b : tV) accumulate(out, commutator(a, b, depth));
    for (auto& c : freed_theta_parts(bracket(U, V), s, sign, depth)) accumulate(out, c * cplx(-1.0));
    return out;
}

FreedResult freed_loop_connection(const Loop& U, const Loop& V, double s, int N, int sign) {
    const Loop UV = bracket(U, V);
    const int b = std::max({U.bandwidth(), V.bandwidth(), UV.bandwidth()});
    if (b > N / 4) throw std::invalid_argument("freed_loop_connection: loop bandwidth exceeds N/4");
    if (N < 32) throw std::invalid_argument("freed_loop_connection: window too small for the decay fit");
    if (sign != 1 && sign != -1) throw std::invalid_argument("freed_loop_connection: exponent flag must be +1 or -1");
    const int Nw = N + 2 * b + 2;  // products are exact on |n| <= Nw - 2b
    Banded tU = theta_dense(U, s, sign, Nw), tV = theta_dense(V, s, sign, Nw), tUV = theta_dense(UV, s, sign, Nw);
    Banded Om = mul(tU, tV);
    Om.M -= mul(tV, tU).M + tUV.M;

    FreedResult r{crop(tU, N), crop(Om, N)};
    double scale = r.thetaU.matrix().cwiseAbs().maxCoeff();
    for (int n = -N; n <= N; ++n)
        for (int m = std::max(-N, n - 2 * b - 2); m <= std::min(N, n + 2 * b + 2); ++m)
            if (r.thetaU.block(m, n).cwiseAbs().maxCoeff() > 1e-13 * scale) r.theta_bandwidth = std::max(r.theta_bandwidth, std::abs(m - n));

    std::vector<double> lx, ly;
    for (int n = std::max(4, N / 8); n <= N / 2; ++n)
        for (int sg : {1, -1}) {
            double g = 0.0;
            for (int k = -2 * b; k <= 2 * b; ++k) g = std::max(g, r.curvature.block(sg * n + k, sg * n).cwiseAbs().maxCoeff());
            if (g > 0.0) {
                lx.push_back(std::log(double(n)));
                ly.push_back(std::log(g));
            }
        }
    r.decay_exponent = lx.size() > 2 ? slope_fit(lx, ly) : -std::numeric_limits<double>::infinity();

    // symbolic curvature for the conditioned and zeta routes and the tail of the direct sum
    const int depth = kDefaultDepth;
    auto parts = freed_curvature_parts(U, V, s, sign, depth);

    cplx direct = 0.0;
    for (int n = -N; n <= N; ++n) direct += r.curvature.diag_trace(n);
    std::vector<PowerLogTerm> both;
    for (auto& P : parts) {
        DiagonalData D = diagonal_data(P);
        both.insert(both.end(), D.plus.begin(), D.plus.end());
        both.insert(both.end(), D.minus.begin(), D.minus.end());
    }
    for (auto& t : both) {
        if (t.coeff == 0.0) continue;
        if (t.alpha >= -1.0 - 1e-12) {
            // divergent pieces must cancel between the half-lines
            cplx partner = 0.0;
            for (auto& u : both)
                if (std::abs(u.alpha - t.alpha) < 1e-12 && u.logpow == t.logpow) partner += u.coeff;
            if (std::abs(partner) > 1e-12) r.conditioned_defined = false;
            continue;
        }
        direct += t.coeff * power_log_sum(t.alpha, t.logpow, N + 1, 1.0, 0)[0];
    }
    r.chern_direct = direct;
    try {
        for (auto& P : parts) r.chern_conditioned += conditioned_trace(P);
    } catch (const std::domain_error&) {
        r.conditioned_defined = false;
        r.chern_conditioned = std::numeric_limits<double>::quiet_NaN();
    }
    for (auto& P : parts) r.chern_zeta += weighted_trace(P, Weight::laplacian());
    return r;
}

}  // namespace ct
