#pragma once

#include "circtrace/series.hpp"

namespace ct {

struct ZetaValue {
    cplx s;
    double a;
    cplx value;
    cplx derivative;  // d/ds
    double accuracy;  // estimated absolute error of value
};

// Hurwitz zeta(s, a) = sum_{n>=0} (n+a)^{-s}.  Throws std::domain_error at s = 1.
ZetaValue zeta(cplx s, double a = 1.0);

// Taylor (Laurent at s0 = 1) expansion of e -> zeta(s0 + e, a) through e^order.
// At s0 = 1 the series starts at e^{-1}.
Series hurwitz_series(cplx s0, double a, int order);

// zeta(1 + e, a) = 1/e + sum_k (-1)^k gamma_k(a)/k! e^k
Series laurent_at_one(double a, int order);

// Stieltjes constants gamma_k = gamma_k(1), computed from laurent_at_one.
double stieltjes(int k);
double euler_gamma();

// polygamma psi^{(m)}(x), x > 0
double polygamma(int m, double x);

// sum_{n>=0} (n+a)^{beta - q z} log^m (n+a) as a Laurent series in z through z^hi
Series power_log_sum(double beta, int m, double a, double q, int hi);

// n^alpha log^l n with coefficient c
struct PowerLogTerm {
    double alpha;
    int logpow;
    cplx coeff;
};

// sum_{n>N} sum_t c_t n^{alpha_t} log^{l_t} n * n^{-q z} exp(-z L(n)),  L(n) = sum_j L_j n^{-j},
// as a Laurent series in z through z^hi.  The expansion of exp(-z L) is cut where N^{-j} is negligible.
Series dirichlet_tail(const std::vector<PowerLogTerm>& d, const std::vector<cplx>& L, double q, int N, int hi);

}  // namespace ct
