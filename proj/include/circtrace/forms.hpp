#pragma once

#include "circtrace/discrete_op.hpp"
#include "circtrace/expr.hpp"

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <vector>

namespace ct {

using Point = std::array<double, kMaxParamDim>;

// Axis subsets are bitmasks; bit i is dx_{i+1}.
int mask_degree(unsigned mask);
// lexicographic list of the k-subsets of {0..p-1}
std::vector<unsigned> subsets(int p, int k);
// dx_I ^ dx_J = sign dx_{I|J}; 0 when I and J overlap
int wedge_sign(unsigned I, unsigned J);

struct ParamDomain {
    int dim = 3;
    std::array<double, kMaxParamDim> lo{}, hi{};
    int points = 5;     // evaluation grid points per axis
    double h = 1e-3;    // finite-difference step
    bool richardson = true;

    std::vector<Point> grid() const;
};

// Scalar k-form given numerically: coefficients in subsets(p, k) order.
struct FormFamily {
    int p = 0, k = 0;
    std::function<std::vector<cplx>(const Point&)> coeffs;
};

// Central-difference exterior derivative, optionally Richardson-extrapolated (4 D_{h/2} - D_h)/3.
FormFamily ext_d(const FormFamily& alpha, double h, bool richardson);
// max over grid points and components; grid points are evaluated concurrently
double max_norm(const FormFamily& f, const std::vector<Point>& grid);
double max_diff(const FormFamily& a, const FormFamily& b, const std::vector<Point>& grid);

// Gauss-Legendre nodes and weights on [lo, hi]
void gauss_legendre(int n, double lo, double hi, std::vector<double>& x, std::vector<double>& w);
// integral of the dx1^dx2 component over [lo0,hi0] x [lo1,hi1], remaining coordinates at lo
cplx integrate_2form(const FormFamily& f, const ParamDomain& dom, int nodes);

// Scalar form with symbolic coefficients.
struct ExprForm {
    int p = 0, k = 0;
    std::map<unsigned, Expr> c;  // mask -> coefficient

    Expr get(unsigned mask) const;
    FormFamily family() const;
    ExprForm d() const;  // exact exterior derivative
};

// Operator-valued form: sum of g(x) A dx_I with symbolic scalar g and fixed operators A.
struct OpTerm {
    unsigned mask;
    Expr coeff;
    std::shared_ptr<const DiscreteOp> op;
};

class OperatorForm {
public:
    OperatorForm(int p = 3, int k = 0) : p_(p), k_(k) {}

    int dim() const { return p_; }
    int degree() const { return k_; }
    const std::vector<OpTerm>& terms() const { return terms_; }

    // merges with an existing term on the same mask and operator
    void add(unsigned mask, const Expr& g, std::shared_ptr<const DiscreteOp> op);
    void add(unsigned mask, const Expr& g, const DiscreteOp& op) {
        add(mask, g, std::make_shared<const DiscreteOp>(op));
    }

    OperatorForm operator+(const OperatorForm& o) const;
    OperatorForm operator-(const OperatorForm& o) const;
    OperatorForm operator*(const Expr& g) const;

    // exact: derivative of the coefficients
    OperatorForm d() const;
    // coefficient of dx_I at x
    DiscreteOp at(unsigned mask, const Point& x) const;
    // trace functional applied coefficientwise: f(g A) = g f(A), f evaluated once per operator
    ExprForm apply(const std::function<cplx(const DiscreteOp&)>& f) const;
    // largest order of a coefficient operator; -inf when empty
    double max_order() const;

private:
    int p_, k_;
    std::vector<OpTerm> terms_;
};

// Memoized operator products (keyed by operand identity).
class ComposeCache {
public:
    explicit ComposeCache(int depth = kDefaultDepth) : depth_(depth) {}
    std::shared_ptr<const DiscreteOp> product(const std::shared_ptr<const DiscreteOp>& a,
                                              const std::shared_ptr<const DiscreteOp>& b);
    int depth() const { return depth_; }

private:
    int depth_;
    std::map<std::pair<const DiscreteOp*, const DiscreteOp*>, std::shared_ptr<const DiscreteOp>> cache_;
    std::vector<std::shared_ptr<const DiscreteOp>> keep_;  // pins operands so keys stay valid
};

OperatorForm wedge(const OperatorForm& a, const OperatorForm& b, ComposeCache& cache);
OperatorForm wedge(const OperatorForm& a, const OperatorForm& b, int depth = kDefaultDepth);
// graded commutator a b - (-1)^{|a||b|} b a
OperatorForm graded_commutator(const OperatorForm& a, const OperatorForm& b, ComposeCache& cache);
OperatorForm power(const OperatorForm& a, int j, ComposeCache& cache);

// Omega = d theta + theta ^ theta
OperatorForm curvature(const OperatorForm& theta, ComposeCache& cache);
// d Omega + [theta, Omega]
OperatorForm bianchi(const OperatorForm& theta, const OperatorForm& omega, ComposeCache& cache);
// max over grid of the coefficient size (dense window |n| <= N) of a form
double op_form_max_norm(const OperatorForm& f, const std::vector<Point>& grid, int N);

}  // namespace ct
