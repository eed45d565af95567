#pragma once

#include "circtrace/forms.hpp"
#include "circtrace/oracle.hpp"
#include "circtrace/traces.hpp"

#include <functional>
#include <string>
#include <vector>

namespace ct {

// A scalar form and its finite-difference exterior derivative.
struct ScalarForms {
    ExprForm form;
    FormFamily dform;
};

// ---------------------------------------------------------------------------
// Chern-Weil forms

// tr(Omega^j) for finite-rank (Patch-only) coefficients.
ScalarForms finite_chern(const OperatorForm& theta, int j, const ParamDomain& dom, ComposeCache& cache);

// Straight-line path theta_t = (1-t) theta0 + t theta1 at time t:
// d/dt tr(Omega_t^j) (central difference in t) and d of j tr(theta' Omega_t^{j-1}).
struct PathCheck {
    FormFamily dt_form, d_transgression;
};
PathCheck finite_chern_path(const OperatorForm& theta0, const OperatorForm& theta1, int j, double t,
                            const ParamDomain& dom, double ht = 1e-3);

enum class SingularFunctional { Residue, Leading };
// res(Omega^j) or tr_0^tau(Omega^j); the leading flavour needs curvature of order <= 0.
ScalarForms singular_chern(const OperatorForm& theta, int j, SingularFunctional f, const ParamDomain& dom,
                           ComposeCache& cache, const LeadingFunctional& tau = LeadingFunctional::uniform());

// lhs = numerical d tr^Q(Omega^j); rhs = -(1/q) res(Omega^j ^ [theta, log Q]) for fixed Q.
// The opposite sign (+1/q) is the printed variant; `printed_rhs` carries it for reporting.
struct DefectForms {
    ExprForm trace_form;
    FormFamily lhs;
    ExprForm rhs, printed_rhs;
};
DefectForms weighted_chern_defect(const OperatorForm& theta, const Weight& Q, int j, const ParamDomain& dom,
                                  ComposeCache& cache);

// ---------------------------------------------------------------------------
// Grassmannian forms

// Grading family: F a 0-form, dF its exact derivative.
struct GradingFamily {
    OperatorForm F, dF;
};
// F = U F0 U^{-1} for unipotent U = prod_i (I + g_i N_i), N_i^2 = 0; dF exact.
GradingFamily conjugation_family(const DiscreteOp& F0, const std::vector<std::pair<Expr, DiscreteOp>>& factors,
                                 int p, ComposeCache& cache);
// max over grid of the symbol of F^2 - I (operator families) or of F^3 - F (finite-rank families)
double grading_defect(const GradingFamily& fam, const std::vector<Point>& grid, ComposeCache& cache);

// Evaluated pointwise: products of the coefficient operators are formed at each x.
struct GrassmannForms {
    FormFamily omega;         // tr^Q(F (dF)^{2j})
    FormFamily domega;        // numerical d
    FormFamily residue_side;  // (1/2q) res([log Q, F] (dF)^{2j+1} F)
};
GrassmannForms grassmann_forms(const GradingFamily& fam, const Weight& Q, int j, const ParamDomain& dom,
                               ComposeCache& cache, double grading_tol = 1e-10);

// ---------------------------------------------------------------------------
// Homotopy transgression

// H(t, x) with H(1, x) = x and H(0, x) constant; returns H and fills dHdt, dHdx (column i = d/dx_i).
struct Homotopy {
    std::function<Point(double t, const Point& x, Point& dHdt, std::array<Point, kMaxParamDim>& dHdx)> map;
    static Homotopy radial(int p);
};
// theta_I(x) = int_0^1 beta(H)(dH/dt, dH/dx_I) dt, so d theta = beta - H_0^* beta.
struct Transgression {
    FormFamily theta;
    double node_doubling_gap = 0.0;  // max |theta_n - theta_2n| on the grid
};
Transgression transgress(const FormFamily& beta, const Homotopy& H, const ParamDomain& dom, int nodes = 16);

// ---------------------------------------------------------------------------
// Loop-group connection on su(2)-valued loops (3-vectors with [a, b] = a x b)

struct Loop {
    TrigPoly c[3];
    int bandwidth() const;
};
Loop bracket(const Loop& a, const Loop& b);

struct FreedResult {
    ModeMatrix thetaU, curvature;
    int theta_bandwidth = 0;
    double decay_exponent = 0.0;
    cplx chern_direct = 0.0, chern_conditioned = 0.0, chern_zeta = 0.0;
    bool conditioned_defined = true;
};
// third_exponent_sign: -1 uses (Q0+pi0)^{-s} inside the third term as printed, +1 the variant.
FreedResult freed_loop_connection(const Loop& U, const Loop& V, double s, int N, int third_exponent_sign = -1);
// symbolic theta^s(V): the order-0 part and the order -2s part (separate classes unless 2s is an integer)
std::vector<DiscreteOp> freed_theta_parts(const Loop& V, double s, int third_exponent_sign = -1,
                                          int depth = kDefaultDepth);
// symbolic curvature Omega^s(U, V), one operator per order class mod integers
std::vector<DiscreteOp> freed_curvature_parts(const Loop& U, const Loop& V, double s, int third_exponent_sign = -1,
                                              int depth = kDefaultDepth);

// ---------------------------------------------------------------------------
// Finite-rank superconnections: forms with Z2-graded matrix coefficients

struct SuperTerm {
    unsigned mask;
    Expr coeff;
    Mat M;  // homogeneous: even (block diagonal) or odd (off-diagonal)
};

class SuperForm {
public:
    SuperForm(int p, int even_rank, int odd_rank) : p_(p), ne_(even_rank), no_(odd_rank) {}
    int dim() const { return p_; }
    int rank() const { return ne_ + no_; }
    int even_rank() const { return ne_; }
    const std::vector<SuperTerm>& terms() const { return terms_; }

    // splits M into even and odd parts
    void add(unsigned mask, const Expr& g, const Mat& M);
    // total-grading product (a x A)(b x B) = (-1)^{|A| |b|} (a ^ b) x AB
    SuperForm operator*(const SuperForm& o) const;
    SuperForm operator+(const SuperForm& o) const;
    SuperForm d() const;
    // supertrace, all form degrees
    ExprForm str() const;
    // matrix parity: 0 even, 1 odd
    int parity(const Mat& M) const;

private:
    int p_, ne_, no_;
    std::vector<SuperTerm> terms_;
};

// str(A^{2j}) = str(F^j), F = d omega + omega^2, for the superconnection d + omega; degree-2j part and its d.
ScalarForms super_chern_finite(const SuperForm& omega, int j, const ParamDomain& dom);

// patch-only operator carrying the block M on mode 0
DiscreteOp mode0_block(const Mat& M, int depth = kDefaultDepth);

}  // namespace ct
