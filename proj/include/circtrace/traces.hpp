#pragma once

#include "circtrace/weight.hpp"
#include "circtrace/zeta.hpp"

#include <string>
#include <utility>
#include <vector>

namespace ct {

struct DivergentTerm {
    double exponent;  // N^exponent log^logpow N
    int logpow;
    cplx coeff;
};

// Large-N behaviour of sum_{0<|n|<=N} tr A(n,n) + patch trace.
// finite_part follows the zeta assignment: n^a -> zeta(-a), n^{-1} log^l n -> gamma_l.
struct FinitePartValue {
    cplx finite_part = 0.0;
    cplx log_coefficient = 0.0;          // coefficient of log N
    std::vector<DivergentTerm> divergent;  // positive powers of N, and log^{>=2} N
};

// Laurent data of Z(z) = sum_n tr diag(A Q^{-z})(n) at z = 0.
struct LaurentData {
    cplx residue = 0.0;
    cplx finite_part = 0.0;
    cplx linear = 0.0;
    cplx pole2 = 0.0;  // z^{-2}
    cplx pole3 = 0.0;  // z^{-3}
    int pole_order() const;
};

// tau(g) = sum_{+/-} (1/2pi) int w_+/-(x) g_+/-(x) dx
struct LeadingFunctional {
    TrigPoly weight_plus = TrigPoly::constant(0.5), weight_minus = TrigPoly::constant(0.5);
    cplx normalization() const { return weight_plus.coeff(0) + weight_minus.coeff(0); }
    static LeadingFunctional uniform() { return {}; }
};

// mean over x of tr f_0: the diagonal behaviour n^alpha log^l n on each half-line
struct DiagonalData {
    std::vector<PowerLogTerm> plus, minus;
};
DiagonalData diagonal_data(const DiscreteOp& A);

// zeta-assigned finite part of sum_{n>=1} n^alpha log^l n
cplx power_log_fp(double alpha, int logpow);

cplx residue(const DiscreteOp& A);
cplx leading_trace(const DiscreteOp& A, const LeadingFunctional& tau = LeadingFunctional::uniform());
FinitePartValue finite_part_trace(const DiscreteOp& A);
cplx canonical_trace(const DiscreteOp& A);
cplx weighted_trace(const DiscreteOp& A, const Weight& Q);
cplx regularized_trace_from_jet(const DiscreteOp& A, const DiscreteOp& Aprime0, cplx alpha_prime0);
cplx conditioned_trace(const DiscreteOp& A, double tol = 1e-12);
LaurentData kv_pole_check(const DiscreteOp& A, const Weight& Q);

// tr C A C^{-1} as seen by the ungauged weight
DiscreteOp ungauge(const DiscreteOp& A, const Weight& Q, int depth = kDefaultDepth);

struct DefectPair {
    cplx lhs, rhs;
    double tail_degree;  // degree of the neglected symbol tail in the computation
};

// lhs = tr^Q([A,B]),  rhs = -(1/q) res(A [B, log Q]).  depth = 0 uses the full depth the inputs carry,
// since the weighted trace of the commutator sees every degree, not just -1.
DefectPair hochschild_defect(const DiscreteOp& A, const DiscreteOp& B, const Weight& Q, int depth = 0);
// lhs = tr^{Q1}(A) - tr^{Q2}(A),  rhs = res(A (log Q2 / q2 - log Q1 / q1))
DefectPair weight_change_defect(const DiscreteOp& A, const Weight& Q1, const Weight& Q2, int depth = 0);

}  // namespace ct
