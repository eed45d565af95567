#include "circtrace/geomforms.hpp"

#include <cmath>
#include <stdexcept>

namespace ct {

namespace {

double symbol_max_abs(const PhgSymbol& s) {
    double m = 0.0;
    for (auto& t : s.terms()) m = std::max({m, t.plus.max_abs(), t.minus.max_abs()});
    return m;
}

double patch_max_abs(const Patch& p) {
    double m = 0.0;
    for (auto& [n, col] : p.columns())
        for (auto& [r, b] : col) m = std::max(m, b.cwiseAbs().maxCoeff());
    return m;
}

bool finite_rank(const OperatorForm& f) {
    for (auto& t : f.terms())
        if (!t.op->symbol().is_zero()) return false;
    return true;
}

OperatorForm zero_form(const DiscreteOp& A, int p) {
    OperatorForm r(p, 0);
    r.add(0, Expr(1.0), A);
    return r;
}

FormFamily scale_diff(const FormFamily& a, const FormFamily& b, double s) {
    return {a.p, a.k, [a, b, s](const Point& x) {
                auto u = a.coeffs(x), v = b.coeffs(x);
                for (size_t i = 0; i < u.size(); ++i) u[i] = (u[i] - v[i]) * s;
                return u;
            }};
}

}  // namespace

ScalarForms finite_chern(const OperatorForm& theta, int j, const ParamDomain& dom, ComposeCache& cache) {
    if (!finite_rank(theta)) throw std::invalid_argument("finite_chern: connection coefficients must be finite rank");
    OperatorForm Oj = power(curvature(theta, cache), j, cache);
    ScalarForms r;
    r.form = Oj.apply([](const DiscreteOp& A) { return A.patch().trace(); });
    r.dform = ext_d(r.form.family(), dom.h, dom.richardson);
    return r;
}

PathCheck finite_chern_path(const OperatorForm& theta0, const OperatorForm& theta1, int j, double t,
                            const ParamDomain& dom, double ht) {
    auto at_time = [&](double tt) { return theta0 * Expr(1.0 - tt) + theta1 * Expr(tt); };
    auto tr = [](const DiscreteOp& A) { return A.patch().trace(); };
    ComposeCache cache;
    ExprForm fp = power(curvature(at_time(t + ht), cache), j, cache).apply(tr);
    ExprForm fm = power(curvature(at_time(t - ht), cache), j, cache).apply(tr);
    OperatorForm th = at_time(t), vel = theta1 - theta0;
    OperatorForm integrand = j == 1 ? vel : wedge(vel, power(curvature(th, cache), j - 1, cache), cache);
    ExprForm tf = (integrand * Expr(double(j))).apply(tr);
    return {scale_diff(fp.family(), fm.family(), 1.0 / (2.0 * ht)), ext_d(tf.family(), dom.h, dom.richardson)};
}

ScalarForms singular_chern(const OperatorForm& theta, int j, SingularFunctional f, const ParamDomain& dom,
                           ComposeCache& cache, const LeadingFunctional& tau) {
    OperatorForm Oj = power(curvature(theta, cache), j, cache);
    ScalarForms r;
    if (f == SingularFunctional::Residue) {
        r.form = Oj.apply([](const DiscreteOp& A) { return residue(A); });
    } else {
        if (Oj.max_order() > 1e-12) throw std::domain_error("singular_chern: leading trace needs curvature of order <= 0");
        r.form = Oj.apply([&](const DiscreteOp& A) { return leading_trace(A, tau); });
    }
    r.dform = ext_d(r.form.family(), dom.h, dom.richardson);
    return r;
}

DefectForms weighted_chern_defect(const OperatorForm& theta, const Weight& Q, int j, const ParamDomain& dom,
                                  ComposeCache& cache) {
    if (theta.terms().empty()) throw std::invalid_argument("weighted_chern_defect: empty connection");
    const int dim = theta.terms().front().op->dim();
    OperatorForm Oj = power(curvature(theta, cache), j, cache);
    DefectForms r;
    r.trace_form = Oj.apply([&](const DiscreteOp& A) { return weighted_trace(A, Q); });
    r.lhs = ext_d(r.trace_form.family(), dom.h, dom.richardson);
    OperatorForm L = zero_form(log_weight_op(Q, cache.depth(), dim), theta.dim());
    OperatorForm X = wedge(Oj, graded_commutator(theta, L, cache), cache);
    const double q = Q.order();
    r.rhs = X.apply([](const DiscreteOp& A) { return residue(A); });
    r.printed_rhs = r.rhs;
    for (auto& [m, g] : r.rhs.c) g = g * Expr(-1.0 / q);
    for (auto& [m, g] : r.printed_rhs.c) g = g * Expr(1.0 / q);
    return r;
}

// ---------------------------------------------------------------------------

GradingFamily conjugation_family(const DiscreteOp& F0, const std::vector<std::pair<Expr, DiscreteOp>>& factors,
                                 int p, ComposeCache& cache) {
    auto I = std::make_shared<const DiscreteOp>(DiscreteOp::identity(F0.dim(), F0.depth()));
    OperatorForm U(p, 0), Ui(p, 0);
    U.add(0, Expr(1.0), I);
    Ui.add(0, Expr(1.0), I);
    for (size_t i = 0; i < factors.size(); ++i) {
        auto& [g, N] = factors[i];
        auto& [gr, Nr] = factors[factors.size() - 1 - i];
        if (!N.symbol().is_zero() || patch_max_abs(compose(N, N, F0.depth()).patch()) > 0.0)
            throw std::invalid_argument("conjugation_family: factors must be finite-rank nilpotent (N^2 = 0)");
        OperatorForm a(p, 0), b(p, 0);
        a.add(0, Expr(1.0), I);
        a.add(0, g, N);
        b.add(0, Expr(1.0), I);
        b.add(0, -gr, Nr);
        U = wedge(U, a, cache);
        Ui = wedge(Ui, b, cache);
    }
    GradingFamily fam;
    fam.F = wedge(wedge(U, zero_form(F0, p), cache), Ui, cache);
    fam.dF = fam.F.d();
    return fam;
}

double grading_defect(const GradingFamily& fam, const std::vector<Point>& grid, ComposeCache& cache) {
    const bool fin = finite_rank(fam.F);
    double worst = 0.0;
    for (auto& x : grid) {
        DiscreteOp F = fam.F.at(0, x);
        DiscreteOp FF = compose(F, F, cache.depth());
        if (fin) {
            DiscreteOp E = compose(FF, F, cache.depth()) - F;
            worst = std::max(worst, patch_max_abs(E.patch()));
        } else {
            DiscreteOp E = FF - DiscreteOp::identity(F.dim(), F.depth());
            worst = std::max(worst, symbol_max_abs(E.symbol()));
        }
    }
    return worst;
}

namespace {

// the family frozen at x: F(x) as a 0-form and dF(x) with constant coefficients
std::pair<OperatorForm, OperatorForm> frozen(const GradingFamily& fam, const Point& x) {
    const int p = fam.F.dim();
    OperatorForm F(p, 0), dF(p, 1);
    F.add(0, Expr(1.0), fam.F.at(0, x));
    for (int i = 0; i < p; ++i) {
        bool any = false;
        for (auto& t : fam.dF.terms()) any = any || t.mask == (1u << i);
        if (any) dF.add(1u << i, Expr(1.0), fam.dF.at(1u << i, x));
    }
    return {F, dF};
}

FormFamily evaluated(int p, int k, std::function<ExprForm(const Point&)> f) {
    auto masks = subsets(p, k);
    return {p, k, [=](const Point& x) {
                ExprForm e = f(x);
                std::vector<cplx> r;
                for (unsigned m : masks) r.push_back(e.get(m).eval(x.data()));
                return r;
            }};
}

}  // namespace

GrassmannForms grassmann_forms(const GradingFamily& fam, const Weight& Q, int j, const ParamDomain& dom,
                               ComposeCache& cache, double grading_tol) {
    if (fam.F.degree() != 0 || fam.dF.degree() != 1) throw std::invalid_argument("grassmann_forms: bad family degrees");
    if (fam.F.terms().empty()) throw std::invalid_argument("grassmann_forms: empty family");
    double dev = grading_defect(fam, dom.grid(), cache);
    if (dev > grading_tol)
        throw std::domain_error("grassmann_forms: F^2 deviates from the identity beyond tolerance (" +
                                std::to_string(dev) + ")");
    const int p = fam.F.dim(), dim = fam.F.terms().front().op->dim(), depth = cache.depth();
    auto L = std::make_shared<const DiscreteOp>(log_weight_op(Q, depth, dim));
    const double q = Q.order();
    GrassmannForms r;
    r.omega = evaluated(p, 2 * j, [fam, Q, j, depth](const Point& x) {
        auto [F, dF] = frozen(fam, x);
        if (dF.terms().empty()) return ExprForm{F.dim(), 2 * j, {}};
        ComposeCache c(depth);
        return wedge(F, power(dF, 2 * j, c), c).apply([&](const DiscreteOp& A) { return weighted_trace(A, Q); });
    });
    r.domega = ext_d(r.omega, dom.h, dom.richardson);
    r.residue_side = evaluated(p, 2 * j + 1, [fam, L, q, j, depth](const Point& x) {
        auto [F, dF] = frozen(fam, x);
        if (dF.terms().empty()) return ExprForm{F.dim(), 2 * j + 1, {}};
        ComposeCache c(depth);
        OperatorForm Lf(F.dim(), 0);
        Lf.add(0, Expr(1.0), L);
        OperatorForm X = wedge(wedge(graded_commutator(Lf, F, c), power(dF, 2 * j + 1, c), c), F, c);
        ExprForm e = X.apply([](const DiscreteOp& A) { return residue(A); });
        for (auto& [m, g] : e.c) g = g * Expr(1.0 / (2.0 * q));
        return e;
    });
    return r;
}

// ---------------------------------------------------------------------------

Homotopy Homotopy::radial(int p) {
    return {[p](double t, const Point& x, Point& dHdt, std::array<Point, kMaxParamDim>& dHdx) {
        Point H{};
        for (int i = 0; i < kMaxParamDim; ++i) {
            dHdx[i] = Point{};
            if (i < p) dHdx[i][i] = t;
            H[i] = i < p ? t * x[i] : 0.0;
            dHdt[i] = i < p ? x[i] : 0.0;
        }
        return H;
    }};
}

namespace {

FormFamily homotopy_integral(const FormFamily& beta, const Homotopy& H, int nodes) {
    const int p = beta.p, k = beta.k - 1;
    auto out_masks = subsets(p, k), in_masks = subsets(p, k + 1);
    std::vector<double> ts, ws;
    gauss_legendre(nodes, 0.0, 1.0, ts, ws);
    return {p, k, [=](const Point& x) {
                std::vector<cplx> r(out_masks.size(), 0.0);
                for (size_t q = 0; q < ts.size(); ++q) {
                    Point dt;
                    std::array<Point, kMaxParamDim> dx;
                    Point h = H.map(ts[q], x, dt, dx);
                    auto b = beta.coeffs(h);
                    for (size_t o = 0; o < out_masks.size(); ++o) {
                        std::vector<const Point*> vec{&dt};
                        for (int i = 0; i < p; ++i)
                            if (out_masks[o] & (1u << i)) vec.push_back(&dx[i]);
                        cplx acc = 0.0;
                        for (size_t c = 0; c < in_masks.size(); ++c) {
                            if (b[c] == 0.0) continue;
                            Eigen::MatrixXd M(k + 1, k + 1);
                            int row = 0;
                            for (int a = 0; a < p; ++a) {
                                if (!(in_masks[c] & (1u << a))) continue;
                                for (int col = 0; col <= k; ++col) M(row, col) = (*vec[col])[a];
                                ++row;
                            }
                            acc += b[c] * M.determinant();
                        }
                        r[o] += ws[q] * acc;
                    }
                }
                return r;
            }};
}

}  // namespace

Transgression transgress(const FormFamily& beta, const Homotopy& H, const ParamDomain& dom, int nodes) {
    if (beta.k < 1) throw std::invalid_argument("transgress: input form must have degree >= 1");
    if (nodes < 16) throw std::invalid_argument("transgress: at least 16 quadrature nodes required");
    Transgression r;
    r.theta = homotopy_integral(beta, H, nodes);
    FormFamily fine = homotopy_integral(beta, H, 2 * nodes);
    r.node_doubling_gap = max_diff(r.theta, fine, dom.grid());
    return r;
}

DiscreteOp mode0_block(const Mat& M, int depth) {
    Patch p(int(M.rows()));
    p.add(0, 0, M);
    return DiscreteOp::patch_only(p, depth);
}

}  // namespace ct
