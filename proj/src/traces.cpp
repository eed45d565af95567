#include "circtrace/traces.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ct {

namespace {

constexpr double kDegTol = 1e-12;

bool is_integer(double v) { return std::abs(v - std::round(v)) <= kDegTol; }

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

double binom(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

// B_2 .. B_16
constexpr std::array<double, 8> kBernoulli = {1.0 / 6,   -1.0 / 30, 1.0 / 42,     -1.0 / 30,
                                              5.0 / 66,  -691.0 / 2730, 7.0 / 6, -3617.0 / 510};

// coefficient vector of L(n) = log(q(n)/|n|^q) in powers n^{-j}, one per half-line
std::pair<std::vector<cplx>, std::vector<cplx>> log_remainder_coeffs(const Weight& Q, int J) {
    PhgSymbol L = log_weight_remainder(Q, J + 1);
    std::vector<cplx> p(J + 1, 0.0), m(J + 1, 0.0);
    for (auto& t : L.terms()) {
        if (t.logpow != 0 || t.j > J) continue;
        p[t.j] += t.plus.at(0, 0, 0);
        m[t.j] += t.minus.at(0, 0, 0);
    }
    return {p, m};
}

// polynomial power in w = n^{-1}, truncated at degree J
std::vector<cplx> poly_power(const std::vector<cplx>& L, int k, int J) {
    std::vector<cplx> r(J + 1, 0.0);
    r[0] = 1.0;
    for (int s = 0; s < k; ++s) {
        std::vector<cplx> t(J + 1, 0.0);
        for (int a = 0; a <= J; ++a)
            for (int b = 0; a + b <= J && b < int(L.size()); ++b) t[a + b] += r[a] * L[b];
        r = t;
    }
    return r;
}

// e[k][m] = coefficient of n^{-1} log^m n in d(n) L(n)^k on one half-line, k, m <= 3
using PoleTable = std::array<std::array<cplx, 4>, 4>;

PoleTable pole_table(const std::vector<PowerLogTerm>& d, const std::vector<cplx>& L, int J) {
    PoleTable e{};
    for (int k = 0; k <= 3; ++k) {
        std::vector<cplx> Lk = poly_power(L, k, J);
        for (auto& t : d) {
            if (!is_integer(t.alpha) || t.alpha < -1.0 - kDegTol) continue;
            int idx = int(std::lround(t.alpha)) + 1;  // n^alpha * n^{-idx} = n^{-1}
            if (idx > J) throw std::logic_error("pole_table: expansion too short");
            e[k][t.logpow] += t.coeff * Lk[idx];
        }
    }
    return e;
}

int needed_expansion(const DiagonalData& D) {
    double amax = -1.0;
    for (auto* side : {&D.plus, &D.minus})
        for (auto& t : *side)
            if (is_integer(t.alpha)) amax = std::max(amax, t.alpha);
    return int(std::lround(amax)) + 1;
}

// exact diagonal trace at mode n
cplx diag_entry(const DiscreteOp& A, int n) { return A.entry(n, n).trace(); }

void em_divergent(double alpha, int logpow, cplx c, std::vector<DivergentTerm>& out) {
    // sum_{n<=N} n^{alpha+e} = zeta(-alpha-e) + sum_r e_r(alpha+e) N^{beta_r + e}; differentiate l times in e
    auto emit = [&](const Series& coef, double beta) {
        if (beta <= kDegTol) return;
        for (int m = 0; m <= logpow; ++m) {
            cplx v = binom(logpow, m) * factorial(logpow - m) * coef[logpow - m];
            if (v != 0.0) out.push_back({beta, m, c * v});
        }
    };
    const int H = logpow;
    Series e0 = Series::constant(alpha + 1.0, H) + Series::monomial(1.0, 1, H);
    emit(e0.inverse().truncated(H), alpha + 1.0);
    emit(Series::constant(0.5, H), alpha);
    Series prod = Series::constant(1.0, H);
    for (int r = 1; r <= int(kBernoulli.size()); ++r) {
        // prod = (alpha+e)(alpha+e-1)...(alpha+e-2r+2)
        for (int i = (r == 1 ? 0 : 2 * r - 3); i <= 2 * r - 2; ++i)
            prod = prod * (Series::constant(alpha - i, H) + Series::monomial(1.0, 1, H));
        double beta = alpha - 2 * r + 1;
        if (beta <= kDegTol) break;
        emit(prod * cplx(kBernoulli[r - 1] / factorial(2 * r)), beta);
    }
}

}  // namespace

int LaurentData::pole_order() const {
    if (pole3 != 0.0) return 3;
    if (pole2 != 0.0) return 2;
    if (residue != 0.0) return 1;
    return 0;
}

DiagonalData diagonal_data(const DiscreteOp& A) {
    DiagonalData D;
    const PhgSymbol& s = A.symbol();
    for (auto& t : s.terms()) {
        cplx cp = t.plus.coeff(0).trace(), cm = t.minus.coeff(0).trace();
        if (cp != 0.0) D.plus.push_back({s.degree(t), t.logpow, cp});
        if (cm != 0.0) D.minus.push_back({s.degree(t), t.logpow, cm});
    }
    return D;
}

cplx power_log_fp(double alpha, int logpow) {
    if (std::abs(alpha + 1.0) <= kDegTol) return stieltjes(logpow);
    Series z = hurwitz_series(cplx(-alpha), 1.0, logpow);
    cplx v = z[logpow] * factorial(logpow);
    return (logpow % 2) ? -v : v;
}

cplx residue(const DiscreteOp& A) {
    const PhgSymbol& s = A.symbol();
    cplx r = 0.0;
    for (auto& t : s.terms())
        if (t.logpow == 0 && std::abs(s.degree(t) + 1.0) <= kDegTol)
            r += t.plus.coeff(0).trace() + t.minus.coeff(0).trace();
    return r;
}

cplx leading_trace(const DiscreteOp& A, const LeadingFunctional& tau) {
    const cplx norm = tau.normalization();
    if (norm == 0.0) throw std::domain_error("leading_trace: tau(1) = 0");
    const PhgSymbol& s = A.symbol();
    if (s.effective_order() > kDegTol) throw std::domain_error("leading_trace: operator has positive order");
    cplx v = 0.0;
    for (auto& t : s.terms()) {
        if (std::abs(s.degree(t)) > kDegTol) continue;
        if (t.logpow > 0) {
            if (!t.plus.is_zero() || !t.minus.is_zero())
                throw std::domain_error("leading_trace: degree-0 part carries log terms");
            continue;
        }
        TrigPoly gp = t.plus.trace(), gm = t.minus.trace();
        for (int k = -gp.bandwidth(); k <= gp.bandwidth(); ++k) v += tau.weight_plus.coeff(-k) * gp.coeff(k);
        for (int k = -gm.bandwidth(); k <= gm.bandwidth(); ++k) v += tau.weight_minus.coeff(-k) * gm.coeff(k);
    }
    return v / norm;
}

FinitePartValue finite_part_trace(const DiscreteOp& A) {
    FinitePartValue f;
    f.finite_part = A.patch().trace();
    DiagonalData D = diagonal_data(A);
    for (auto* side : {&D.plus, &D.minus})
        for (auto& t : *side) {
            f.finite_part += t.coeff * power_log_fp(t.alpha, t.logpow);
            if (std::abs(t.alpha + 1.0) <= kDegTol) {
                // sum n^{-1} log^l n ~ log^{l+1} N / (l+1)
                if (t.logpow == 0)
                    f.log_coefficient += t.coeff;
                else
                    f.divergent.push_back({0.0, t.logpow + 1, t.coeff / double(t.logpow + 1)});
            } else {
                em_divergent(t.alpha, t.logpow, t.coeff, f.divergent);
            }
        }
    return f;
}

cplx canonical_trace(const DiscreteOp& A) {
    double eo = A.symbol().effective_order();
    if (eo >= -1.0 - kDegTol && is_integer(eo))
        throw std::domain_error("canonical_trace: integer order >= -1 (use weighted_trace)");
    return finite_part_trace(A).finite_part;
}

DiscreteOp ungauge(const DiscreteOp& A, const Weight& Q, int depth) {
    if (!Q.has_gauge()) return A;
    const DiscreteOp &C = Q.gauge(), &Ci = Q.gauge_inverse();
    int d = std::min({depth, A.depth(), C.depth(), Ci.depth()});
    return compose(C, compose(A, Ci, d), d);
}

cplx weighted_trace(const DiscreteOp& A0, const Weight& Q) {
    const DiscreteOp A = ungauge(A0, Q, A0.depth());
    cplx v = finite_part_trace(A).finite_part;
    DiagonalData D = diagonal_data(A);
    const int J = needed_expansion(D);
    if (J < 0) return v;
    auto [Lp, Lm] = log_remainder_coeffs(Q, J);
    PoleTable ep = pole_table(D.plus, Lp, J), em = pole_table(D.minus, Lm, J);
    const double q = Q.order();
    for (int k = 1; k <= 3; ++k)
        v += ((k % 2) ? -1.0 : 1.0) / (k * std::pow(q, k)) * (ep[k][k - 1] + em[k][k - 1]);
    return v;
}

cplx regularized_trace_from_jet(const DiscreteOp& A, const DiscreteOp& Aprime0, cplx alpha_prime0) {
    if (alpha_prime0 == 0.0) throw std::domain_error("regularized_trace_from_jet: alpha'(0) = 0");
    return finite_part_trace(A).finite_part - residue(Aprime0) / alpha_prime0;
}

cplx conditioned_trace(const DiscreteOp& A, double tol) {
    const PhgSymbol& s = A.symbol();
    for (auto& t : s.terms()) {
        if (s.degree(t) < -1.0 - kDegTol) continue;
        if (!t.plus.trace().is_zero(tol) || !t.minus.trace().is_zero(tol))
            throw std::domain_error("conditioned_trace: not conditionally trace-class");
    }
    cplx v = A.patch().trace();
    DiagonalData D = diagonal_data(A);
    for (auto* side : {&D.plus, &D.minus})
        for (auto& t : *side)
            if (t.alpha < -1.0 - kDegTol) v += t.coeff * power_log_fp(t.alpha, t.logpow);
    return v;
}

LaurentData kv_pole_check(const DiscreteOp& A0, const Weight& Q) {
    const DiscreteOp A = ungauge(A0, Q, A0.depth());
    LaurentData out;
    const double q = Q.order();
    DiagonalData D = diagonal_data(A);
    out.finite_part = weighted_trace(A, Q.ungauged());
    const int J = needed_expansion(D);
    if (J >= 0) {
        auto [Lp, Lm] = log_remainder_coeffs(Q, J);
        PoleTable ep = pole_table(D.plus, Lp, J), em = pole_table(D.minus, Lm, J);
        auto e = [&](int k, int m) { return ep[k][m] + em[k][m]; };
        for (int k = 0; k <= 2; ++k) out.residue += ((k % 2) ? -1.0 : 1.0) * e(k, k) / std::pow(q, k + 1);
        for (int k = 0; k <= 1; ++k) out.pole2 += ((k % 2) ? -1.0 : 1.0) * double(k + 1) * e(k, k + 1) / std::pow(q, k + 2);
        out.pole3 = 2.0 * e(0, 2) / std::pow(q, 3);
    }
    // z^1 coefficient: exact low modes plus Hurwitz tail
    const int N0 = std::max({32, A.patch().support() + 1, A.symbol().bandwidth() + 1});
    cplx lin = 0.0;
    for (int n = -N0; n <= N0; ++n) lin -= diag_entry(A, n) * std::log(Q.value(n));
    const int Jt = std::max(J, 0) + 40;
    auto [Lp, Lm] = log_remainder_coeffs(Q, Jt);
    lin += dirichlet_tail(D.plus, Lp, q, N0, 1)[1] + dirichlet_tail(D.minus, Lm, q, N0, 1)[1];
    out.linear = lin;
    return out;
}

namespace {

int covering_depth(double order, int requested, const std::vector<int>& available, const char* who,
                   bool full_default = false) {
    // degree -1 sits at j = order + 1
    int need = 1;
    if (is_integer(order) && order >= -1.0 - kDegTol) need = int(std::lround(order)) + 2;
    int avail = std::numeric_limits<int>::max();
    for (int a : available) avail = std::min(avail, a);
    int depth = requested > 0 ? requested : full_default ? std::max(need, avail) : need;
    if (depth < need)
        throw std::domain_error(std::string(who) + ": truncation too shallow, degree -1 not covered (depth " +
                                std::to_string(depth) + " < " + std::to_string(need) + ")");
    if (depth > avail)
        throw std::domain_error(std::string(who) + ": truncation too shallow, degree " +
                                std::to_string(order - avail) + " not resolved (inputs carry depth " +
                                std::to_string(avail) + ", need " + std::to_string(depth) + ")");
    return depth;
}

}  // namespace

DefectPair hochschild_defect(const DiscreteOp& A, const DiscreteOp& B, const Weight& Q, int depth) {
    const double order = A.order() + B.order();
    std::vector<int> avail = {A.depth(), B.depth()};
    if (Q.has_gauge()) {
        avail.push_back(Q.gauge().depth());
        avail.push_back(Q.gauge_inverse().depth());
    }
    const int N = covering_depth(order, depth, avail, "hochschild_defect", true);
    DiscreteOp L = log_weight_op(Q, N, A.dim());
    DefectPair r;
    r.lhs = weighted_trace(commutator(A, B, N), Q);
    r.rhs = -residue(compose(A, commutator(B, L, N), N)) / Q.order();
    r.tail_degree = order - N;
    return r;
}

DefectPair weight_change_defect(const DiscreteOp& A, const Weight& Q1, const Weight& Q2, int depth) {
    std::vector<int> avail = {A.depth()};
    for (const Weight* Q : {&Q1, &Q2})
        if (Q->has_gauge()) {
            avail.push_back(Q->gauge().depth());
            avail.push_back(Q->gauge_inverse().depth());
        }
    const int N = covering_depth(A.order(), depth, avail, "weight_change_defect");
    DiscreteOp L1 = log_weight_op(Q1, N, A.dim()), L2 = log_weight_op(Q2, N, A.dim());
    DiscreteOp diff = L2 * cplx(1.0 / Q2.order()) - L1 * cplx(1.0 / Q1.order());
    DefectPair r;
    r.lhs = weighted_trace(A, Q1) - weighted_trace(A, Q2);
    r.rhs = residue(compose(A, diff, N));
    r.tail_degree = A.order() - N;
    return r;
}

}  // namespace ct
