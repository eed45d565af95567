#include "circtrace/zeta.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>

namespace ct {

namespace {

// B_2, B_4, ..., B_18
const double kBern[9] = {1.0 / 6.0,      -1.0 / 30.0,     1.0 / 42.0,
                         -1.0 / 30.0,    5.0 / 66.0,      -691.0 / 2730.0,
                         7.0 / 6.0,      -3617.0 / 510.0, 43867.0 / 798.0};
const int kEMOrder = 8;  // corrections B_2 .. B_16

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

struct EMOut {
    Series s;
    double err;
};

// Remainder bound after B_16 at argument of real part sig and modulus r.
double em_remainder(double sig, double r, double X) {
    double poch = 1.0;
    for (int i = 0; i <= 2 * kEMOrder; ++i) poch *= (r + i);
    double den = sig + 2 * kEMOrder + 1;
    if (den <= 0.5) return std::numeric_limits<double>::infinity();
    return std::abs(kBern[kEMOrder]) / factorial(2 * kEMOrder + 2) * poch *
           std::pow(X, -sig - 2 * kEMOrder - 1) * (r + 2 * kEMOrder + 1) / den;
}

EMOut euler_maclaurin(cplx s0, double a, int K) {
    const bool pole = (s0 == cplx(1.0, 0.0));
    // Cauchy estimate on |s - s0| = 1 bounds every Taylor coefficient of the remainder.
    const double sig = s0.real() - 1.0, rad = std::abs(s0) + 1.0;
    int M = 0;
    double bnd = 0;
    for (;; ++M) {
        double X = a + M;
        if (X < 1.0) continue;
        double scale = 1.0;
        if (!pole) scale += std::abs(std::pow(cplx(X), 1.0 - s0) / (s0 - 1.0));
        bnd = em_remainder(sig, rad, X);
        if (bnd <= 1e-16 * scale) break;
        if (M > 2000000) break;
    }
    const double X = a + M, LX = std::log(X);
    Series tot(pole ? -1 : 0, K);
    double mag = 0.0;
    for (int n = 0; n < M; ++n) {
        double L = std::log(n + a);
        cplx v = std::exp(-s0 * L);
        mag += std::abs(v);
        tot += Series::exp_linear(v, -L, K);
    }
    if (pole) {
        Series I(-1, K);
        double t = 1.0;
        for (int k = 0; k <= K + 1; ++k) {
            I.at(k - 1) = t;
            t *= -LX / double(k + 1);
        }
        tot += I;
    } else {
        Series lin(0, K);
        lin.at(0) = s0 - 1.0;
        if (K >= 1) lin.at(1) = 1.0;
        tot += Series::exp_linear(std::exp((1.0 - s0) * LX), -LX, K) * lin.inverse();
    }
    tot += Series::exp_linear(0.5 * std::exp(-s0 * LX), -LX, K);
    for (int k = 1; k <= kEMOrder; ++k) {
        Series poly = Series::constant(1.0, K);
        for (int i = 0; i <= 2 * k - 2; ++i) {
            Series lin(0, K);
            lin.at(0) = s0 + double(i);
            if (K >= 1) lin.at(1) = 1.0;
            poly = poly * lin;
        }
        cplx c = kBern[k - 1] / factorial(2 * k);
        tot += poly * Series::exp_linear(c * std::exp((-s0 - double(2 * k - 1)) * LX), -LX, K);
    }
    double err = bnd + 4e-16 * mag * std::pow(1.0 + std::log(a + M + 1.0), K);
    return {tot, err};
}

// zeta(s0 + e, f) for real s0 < 0 and 0 < f <= 1 via the Hurwitz functional equation.
EMOut functional_equation(double s0, double f, int K) {
    const double sp = 1.0 - s0;  // s' = sp - e
    // log Gamma(sp - e)
    Series lg(0, K);
    lg.at(0) = std::lgamma(sp);
    double sgn = -1.0;
    for (int k = 1; k <= K; ++k) {
        lg.at(k) = polygamma(k - 1, sp) * sgn / factorial(k);
        sgn = -sgn;
    }
    Series G = lg.exp();
    const double twopi = 2.0 * M_PI;
    Series P = Series::exp_linear(std::pow(twopi, -sp), std::log(twopi), K);
    auto cos_series = [&](double u0) {
        Series c(0, K);
        double w = 1.0;
        for (int k = 0; k <= K; ++k) {
            c.at(k) = std::cos(u0 + k * M_PI / 2.0) * w;
            w *= (-M_PI / 2.0) / double(k + 1);
        }
        return c;
    };
    Series sum(0, K);
    if (std::abs(f - 1.0) < 1e-15) {
        Series z = hurwitz_series(sp, 1.0, K).rescaled(-1.0);
        sum = cos_series(M_PI * sp / 2.0) * z;
    } else {
        for (long n = 1;; ++n) {
            double ln = std::log(double(n));
            double mag = std::pow(double(n), -sp);
            sum += cos_series(M_PI * sp / 2.0 - twopi * n * f) * Series::exp_linear(mag, ln, K);
            if (mag * std::pow(1.0 + ln, K) < 1e-18 || n > 4000000) break;
        }
    }
    Series out = G * P * sum * 2.0;
    return {out, 1e-14 * std::abs(out[0]) + 1e-300};
}

EMOut series_impl(cplx s0, double a, int K) {
    if (!(a > 0.0)) throw std::domain_error("zeta: shift a must be positive");
    double fl = std::ceil(a) - 1.0;
    double f = a - fl;  // in (0,1]
    bool unit = std::abs(f - 1.0) < 1e-15;
    if (s0.imag() == 0.0 && a <= 12.0 && (s0.real() < -3.0 || (unit && s0.real() < -0.5))) {
        EMOut r = functional_equation(s0.real(), f, K);
        for (int i = 0; i < int(fl); ++i) {
            double L = std::log(f + i);
            r.s -= Series::exp_linear(std::exp(-s0.real() * L), -L, K);
        }
        return r;
    }
    return euler_maclaurin(s0, a, K);
}

}  // namespace

Series hurwitz_series(cplx s0, double a, int order) { return series_impl(s0, a, order).s; }

ZetaValue zeta(cplx s, double a) {
    if (s == cplx(1.0, 0.0)) throw std::domain_error("zeta: pole at s = 1 (use laurent_at_one)");
    EMOut r = series_impl(s, a, 1);
    return {s, a, r.s[0], r.s[1], r.err};
}

Series laurent_at_one(double a, int order) { return euler_maclaurin(1.0, a, order).s; }

double stieltjes(int k) {
    static std::once_flag once;
    static Series L;
    std::call_once(once, [] { L = laurent_at_one(1.0, 8); });
    if (k < 0 || k > 8) throw std::out_of_range("stieltjes: k in 0..8");
    double sign = (k % 2) ? -1.0 : 1.0;
    return (sign * factorial(k) * L[k]).real();
}

double euler_gamma() { return stieltjes(0); }

double polygamma(int m, double x) {
    if (!(x > 0.0)) throw std::domain_error("polygamma: x must be positive");
    if (m >= 1) {
        double sign = (m % 2) ? 1.0 : -1.0;
        return sign * factorial(m) * zeta(double(m + 1), x).value.real();
    }
    double acc = 0.0;
    while (x < 12.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    double x2 = 1.0 / (x * x), p = x2, s = std::log(x) - 0.5 / x;
    for (int k = 1; k <= kEMOrder; ++k) {
        s -= kBern[k - 1] / (2.0 * k) * p;
        p *= x2;
    }
    return acc + s;
}

Series power_log_sum(double beta, int m, double a, double q, int hi) {
    // (-1)^m d^m/ds^m zeta(s, a) at s = -beta + q z
    Series z = hurwitz_series(cplx(-beta), a, hi + m + 1);
    for (int i = 0; i < m; ++i) z = z.derivative();
    if (m % 2) z = -z;
    return z.rescaled(q).truncated(hi);
}

Series dirichlet_tail(const std::vector<PowerLogTerm>& d, const std::vector<cplx>& L, double q, int N, int hi) {
    if (N < 1) throw std::invalid_argument("dirichlet_tail: N must be >= 1");
    // poles of order <= 3 in z: carry the z-polynomials three orders further
    const int H = hi + 4;
    double amax = -1e300;
    for (auto& t : d) amax = std::max(amax, t.alpha);
    Series out(-3, hi);
    if (d.empty()) return out;
    // smallest j with N^{amax + 1 - j} below 1e-18 relative
    const int J = std::max(1, int(std::ceil(amax + 1.0 + 18.0 * std::log(10.0) / std::log(double(N))))) + 1;
    // E(w) = exp(-z sum_{j>=1} L_j w^j) = sum_j P_j(z) w^j
    std::vector<Series> g(J + 1, Series::constant(0.0, H)), E(J + 1, Series::constant(0.0, H));
    for (int j = 1; j <= J && j < int(L.size()); ++j) g[j] = Series::monomial(-L[j], 1, H);
    E[0] = Series::constant(1.0, H);
    for (int n = 1; n <= J; ++n) {
        Series acc = Series::constant(0.0, H);
        for (int k = 1; k <= n; ++k) acc += g[k] * E[n - k] * cplx(double(k));
        E[n] = acc * cplx(1.0 / n);
    }
    Series e0 = Series::exp_linear(1.0, L.empty() ? cplx(0.0) : -L[0], H);
    const double a = double(N + 1);
    for (auto& t : d) {
        if (t.coeff == 0.0) continue;
        for (int j = 0; j <= J; ++j) {
            bool any = false;
            for (int k = 0; k <= H; ++k) any = any || E[j][k] != 0.0;
            if (!any) continue;
            Series h = power_log_sum(t.alpha - j, t.logpow, a, q, H);
            out += (e0 * E[j] * h * t.coeff).truncated(hi);
        }
    }
    return out;
}

}  // namespace ct
