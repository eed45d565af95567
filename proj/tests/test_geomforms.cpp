#include "circtrace/geomforms.hpp"
#include "helpers.hpp"

#include <doctest.h>

using namespace ct;
using th::mono;

namespace {

Expr X(int i) { return Expr::var(i); }

ParamDomain cube(int p, double lo = -0.7, double hi = 0.8, int points = 4) {
    ParamDomain d;
    d.dim = p;
    for (int a = 0; a < p; ++a) d.lo[a] = lo, d.hi[a] = hi;
    d.points = points;
    return d;
}

DiscreteOp mat2(cplx a, cplx b, cplx c, cplx d) {
    Mat M(2, 2);
    M << a, b, c, d;
    return mode0_block(M);
}

}  // namespace

TEST_CASE("exterior derivative") {
    auto dom = cube(3);
    auto grid = dom.grid();
    ExprForm a{3, 1, {}};
    a.c[2] = X(0);  // x1 dx2
    FormFamily da = ext_d(a.family(), 1e-3, false);
    ExprForm want{3, 2, {}};
    want.c[3] = Expr(1.0);
    CHECK(max_diff(da, want.family(), grid) < 1e-11);

    ExprForm f{3, 0, {}};
    f.c[0] = sin(X(0)) * cos(X(1));
    CHECK(max_norm(ext_d(ext_d(f.family(), 1e-3, true), 1e-3, true), grid) < 1e-8);
    CHECK(max_diff(ext_d(f.family(), 1e-3, true), f.d().family(), grid) < 1e-10);
    // ExprForm::d is exact, so d(d f) vanishes identically
    CHECK(max_norm(f.d().d().family(), grid) == 0.0);
}

TEST_CASE("central differences converge at second order") {
    // central stencils commute, so d(d f) cancels to roundoff; the order is read off the derivative error
    auto grid = cube(2, -0.5, 0.6, 5).grid();
    ExprForm f{2, 0, {}};
    f.c[0] = sin(X(0)) * cos(X(1)) + exp(Expr(0.5) * X(0) * X(1));
    FormFamily exact = f.d().family();
    double e1 = max_diff(ext_d(f.family(), 0.02, false), exact, grid);
    double e2 = max_diff(ext_d(f.family(), 0.01, false), exact, grid);
    double e4 = max_diff(ext_d(f.family(), 0.005, false), exact, grid);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
    CHECK(e2 / e4 == doctest::Approx(4.0).epsilon(0.05));
    CHECK(max_diff(ext_d(f.family(), 0.02, true), exact, grid) < e1 / 100);
}

TEST_CASE("wedge: signs, Hardy pair and graded cyclicity") {
    auto grid = cube(3).grid();
    OperatorForm a(3, 1);
    a.add(1, sin(X(1)), th::hardy_up());
    CHECK(wedge(a, a).terms().empty());

    Expr f1 = Expr(1.0) + X(0), f2 = cos(X(2));
    OperatorForm t1(3, 1), t2(3, 1);
    t1.add(1, f1, th::hardy_up());
    t2.add(2, f2, th::hardy_down());
    OperatorForm w = wedge(t1, t2) + wedge(t2, t1);
    Point x{0.3, -0.1, 0.4};
    DiscreteOp c = w.at(3, x);
    Patch P1(1);
    P1.add(1, 1, Mat::Constant(1, 1, 1.0));
    cplx g = f1.eval(x.data()) * f2.eval(x.data());
    CHECK(th::max_entry(c + DiscreteOp::patch_only(P1) * g, 20) < 1e-14);

    // finite rank: tr(a^b) = (-1)^{|a||b|} tr(b^a)
    th::Rng r(41);
    auto rnd = [&](int k) {
        OperatorForm f(3, k);
        for (unsigned m : subsets(3, k))
            for (int i = 0; i < 2; ++i) f.add(m, Expr(r.sym()) + Expr(r.sym()) * X(i), mat2(r.c(), r.c(), r.c(), r.c()));
        return f;
    };
    auto tr = [](const DiscreteOp& A) { return A.patch().trace(); };
    for (auto [p, q] : {std::pair{1, 1}, {1, 2}, {0, 2}}) {
        OperatorForm A = rnd(p), B = rnd(q);
        ExprForm ab = wedge(A, B).apply(tr), ba = wedge(B, A).apply(tr);
        double s = (p * q) % 2 ? -1.0 : 1.0;
        ExprForm diff{3, p + q, {}};
        for (auto& [m, e] : ab.c) diff.c[m] = e - Expr(s) * ba.get(m);
        CHECK(max_norm(diff.family(), grid) < 1e-14);
    }
}

TEST_CASE("finite Chern forms") {
    auto dom = cube(3);
    auto grid = dom.grid();
    OperatorForm th(3, 1);
    th.add(2, Expr(cplx(0, 1)) * X(0), mode0_block(Mat::Identity(1, 1)));
    ComposeCache c;
    ScalarForms f = finite_chern(th, 1, dom, c);
    ExprForm want{3, 2, {}};
    want.c[3] = Expr(cplx(0, 1));
    CHECK(max_diff(f.form.family(), want.family(), grid) < 1e-15);
    CHECK(max_norm(f.dform, grid) < 1e-10);
}

TEST_CASE("homotopy invariance along a path of connections") {
    auto dom = cube(3, -0.5, 0.6, 3);
    auto grid = dom.grid();
    th::Rng r(42);
    auto rnd = [&] {
        OperatorForm f(3, 1);
        for (int a = 0; a < 3; ++a)
            for (int i = 0; i < 2; ++i)
                f.add(1u << a, Expr(r.sym()) + Expr(r.sym()) * sin(X((a + i) % 3)), mat2(r.c(), r.c(), r.c(), r.c()));
        return f;
    };
    OperatorForm t0 = rnd(), t1 = rnd();
    for (int j : {1}) {
        PathCheck pc = finite_chern_path(t0, t1, j, 0.4, dom);
        CHECK(max_norm(pc.dt_form, grid) > 0.1);
        CHECK(max_diff(pc.dt_form, pc.d_transgression, grid) < 1e-6);
    }
}

TEST_CASE("Bianchi identity and closedness shrink under refinement") {
    th::Rng r(43);
    OperatorForm th(3, 1);
    for (int a = 0; a < 3; ++a) th.add(1u << a, sin(X((a + 1) % 3)) + X(a), mat2(r.c(), r.c(), r.c(), r.c()));
    ComposeCache c;
    OperatorForm Om = curvature(th, c);
    auto dom = cube(3);
    CHECK(op_form_max_norm(bianchi(th, Om, c), dom.grid(), 2) < 1e-13);
    dom.richardson = false;
    dom.h = 2e-2;
    double e1 = max_norm(finite_chern(th, 1, dom, c).dform, dom.grid());
    dom.h = 1e-2;
    double e2 = max_norm(finite_chern(th, 1, dom, c).dform, dom.grid());
    // d of the exact form vanishes; the numerical d only carries stencil roundoff or O(h^2) error
    CHECK(e2 <= std::max(e1 / 3.0, 1e-11));
}

TEST_CASE("singular Chern forms") {
    auto dom = cube(3, -0.5, 0.5, 3);
    auto grid = dom.grid();
    th::Rng r(44);
    ComposeCache c;
    OperatorForm P(3, 1);
    for (int a = 0; a < 3; ++a) P.add(1u << a, X(a) + Expr(0.5), DiscreteOp::patch_only(th::random_patch(r, 1, 2, 3)));
    for (auto f : {SingularFunctional::Residue, SingularFunctional::Leading}) {
        ScalarForms s = singular_chern(P, 1, f, dom, c);
        CHECK(max_norm(s.form.family(), grid) == 0.0);
    }
    // Hardy pair: no degree -1 part
    OperatorForm h(3, 1);
    h.add(1, Expr(1.0) + X(2), th::hardy_up());
    h.add(2, cos(X(2)), th::hardy_down());
    ScalarForms hr = singular_chern(h, 1, SingularFunctional::Residue, dom, c);
    CHECK(max_norm(hr.form.family(), grid) == 0.0);

    // multiplication-operator curvature: tr_0 with uniform tau equals the fiberwise Chern form averaged over x_M
    OperatorForm m(3, 1);
    Mat A(2, 2), B(2, 2);
    A << 0.0, 1.0, -1.0, cplx(0, 0.5);
    B << cplx(0, 1), 0.3, 0.2, 0.0;
    m.add(1, sin(X(1)), DiscreteOp::multiplication(MatrixTrigPoly::constant(A)));
    m.add(2, X(0) * X(2), DiscreteOp::multiplication(MatrixTrigPoly::constant(B)));
    OperatorForm fin(3, 1);
    fin.add(1, sin(X(1)), mode0_block(A));
    fin.add(2, X(0) * X(2), mode0_block(B));
    ScalarForms lt = singular_chern(m, 1, SingularFunctional::Leading, dom, c);
    ScalarForms fc = finite_chern(fin, 1, dom, c);
    CHECK(max_diff(lt.form.family(), fc.form.family(), grid) < 1e-13);
    CHECK(max_norm(fc.form.family(), grid) > 0.01);

    // smoothing insensitivity
    OperatorForm hp = h;
    hp.add(4, X(0), DiscreteOp::patch_only(th::random_patch(r, 1, 2, 3)));
    hp.add(1, X(1), DiscreteOp::patch_only(th::random_patch(r, 1, 2, 3)));
    ScalarForms hr2 = singular_chern(hp, 1, SingularFunctional::Residue, dom, c);
    CHECK(max_diff(hr2.form.family(), hr.form.family(), grid) == 0.0);
}

TEST_CASE("weighted Chern defect") {
    auto dom = cube(3);
    auto grid = dom.grid();
    ComposeCache c;
    OperatorForm ab(3, 1);
    ab.add(1, X(1), DiscreteOp(PhgSymbol::power(0.0)));
    ab.add(2, X(2) * X(0), DiscreteOp(PhgSymbol::power(0.0)));
    DefectForms z = weighted_chern_defect(ab, Weight::abs_D(), 1, dom, c);
    CHECK(max_norm(z.lhs, grid) < 1e-11);
    CHECK(max_norm(z.rhs.family(), grid) == 0.0);

    th::Rng r(45);
    OperatorForm P(3, 1);
    for (int a = 0; a < 3; ++a) P.add(1u << a, sin(X(a)), DiscreteOp::patch_only(th::random_patch(r, 1, 2, 3)));
    DefectForms pz = weighted_chern_defect(P, Weight::bracket(), 1, dom, c);
    CHECK(max_norm(pz.lhs, grid) < 1e-10);
    CHECK(max_norm(pz.rhs.family(), grid) == 0.0);

    Expr f1 = Expr(1.0) + Expr(0.5) * sin(X(2)) + Expr(0.3) * X(0), f2 = cos(X(2)) * Expr(0.8) + Expr(0.2) * X(1) * X(2);
    OperatorForm h(3, 1);
    h.add(1, f1, th::hardy_up());
    h.add(2, f2, th::hardy_down());
    for (const Weight& Q : {Weight::abs_D(), Weight::laplacian()}) {
        DefectForms d = weighted_chern_defect(h, Q, 1, dom, c);
        ExprForm expect{3, 2, {}};
        expect.c[3] = -(f1 * f2);
        CHECK(max_diff(d.trace_form.family(), expect.family(), grid) < 1e-14);
        CHECK(max_norm(d.lhs, grid) > 0.1);
        CHECK(max_diff(d.lhs, d.rhs.family(), grid) < 1e-8);
        // smoothing perturbations shift both sides by the same amount
        OperatorForm hp = h;
        hp.add(4, X(1), DiscreteOp::patch_only(th::random_patch(r, 1, 2, 2)));
        DefectForms e = weighted_chern_defect(hp, Q, 1, dom, c);
        CHECK(max_diff(e.lhs, e.rhs.family(), grid) < 1e-8);
    }
}

namespace {

DiscreteOp sign_op() {
    Patch p(1);
    p.add(0, 0, Mat::Constant(1, 1, 1.0));
    return DiscreteOp(PhgSymbol::term(0.0, mono(0, 1.0), mono(0, -1.0)), p);
}

GradingFamily conj_family(ComposeCache& c) {
    Patch n1(1), n2(1);
    n1.add(1, -1, Mat::Constant(1, 1, 0.7));
    n1.add(2, -1, Mat::Constant(1, 1, 0.3));
    n2.add(-1, 1, Mat::Constant(1, 1, 1.1));
    n2.add(-1, 2, Mat::Constant(1, 1, 0.4));
    std::vector<std::pair<Expr, DiscreteOp>> fac{{sin(X(0)) + X(1), DiscreteOp::patch_only(n1)},
                                                 {cos(X(1) * X(2)) + X(0) * X(2), DiscreteOp::patch_only(n2)}};
    return conjugation_family(sign_op(), fac, 3, c);
}

}  // namespace

TEST_CASE("Grassmannian forms: constant and conjugation families") {
    auto dom = cube(3);
    auto grid = dom.grid();
    ComposeCache c;
    GradingFamily k{OperatorForm(3, 0), OperatorForm(3, 1)};
    k.F.add(0, Expr(1.0), sign_op());
    CHECK(grading_defect(k, grid, c) == 0.0);
    GrassmannForms z = grassmann_forms(k, Weight::abs_D(), 1, dom, c);
    CHECK(max_norm(z.omega, grid) == 0.0);
    CHECK(max_norm(z.residue_side, grid) == 0.0);

    GradingFamily f = conj_family(c);
    CHECK(grading_defect(f, grid, c) < 1e-12);
    for (auto& t : f.dF.terms()) CHECK(t.op->symbol().is_zero());
    GrassmannForms a = grassmann_forms(f, Weight::abs_D(), 1, dom, c), b = grassmann_forms(f, Weight::bracket(), 1, dom, c);
    CHECK(max_norm(a.omega, grid) > 0.1);
    CHECK(max_diff(a.omega, b.omega, grid) < 1e-10);
    CHECK(max_norm(a.residue_side, grid) == 0.0);
    CHECK(max_norm(a.domega, grid) < 1e-6);

    // equals the plain trace of F dF_1 dF_2 - F dF_2 dF_1 at a point
    Point x{0.2, -0.3, 0.5};
    DiscreteOp F = f.F.at(0, x), d1 = f.dF.at(1, x), d2 = f.dF.at(2, x);
    cplx plain = canonical_trace(compose(F, commutator(d1, d2)));
    CHECK(std::abs(a.omega.coeffs(x)[0] - plain) < 1e-11);

    GradingFamily bad{OperatorForm(3, 0), OperatorForm(3, 1)};
    bad.F.add(0, Expr(2.0), sign_op());
    CHECK(grading_defect(bad, grid, c) > 1.0);
    CHECK_THROWS(grassmann_forms(bad, Weight::abs_D(), 1, dom, c));
}

TEST_CASE("Grassmannian forms: Pauli family on a sphere chart") {
    ParamDomain dom;
    dom.dim = 3;
    dom.lo = {0.0, 0.0, 0.2};
    dom.hi = {M_PI, 2 * M_PI, 0.9};
    dom.points = 3;
    auto grid = dom.grid();
    Expr ph = X(1) + X(2) * cos(X(0));
    Mat s[3] = {Mat::Zero(2, 2), Mat::Zero(2, 2), Mat::Zero(2, 2)};
    s[0] << 0.0, 1.0, 1.0, 0.0;
    s[1] << 0.0, cplx(0, -1), cplx(0, 1), 0.0;
    s[2] << 1.0, 0.0, 0.0, -1.0;
    Expr n[3] = {sin(X(0)) * cos(ph), sin(X(0)) * sin(ph), cos(X(0))};
    GradingFamily f{OperatorForm(3, 0), OperatorForm(3, 1)};
    for (int a = 0; a < 3; ++a) f.F.add(0, n[a], mode0_block(s[a]));
    f.dF = f.F.d();
    ComposeCache c;
    GrassmannForms g = grassmann_forms(f, Weight::laplacian(), 1, dom, c);
    CHECK(max_norm(g.domega, grid) < 1e-6);
    // 4i n.(d1 n x d2 n) integrates to 16 pi i for a degree-one map
    cplx I = integrate_2form(g.omega, dom, 64);
    CHECK(std::abs(I - cplx(0, 16 * M_PI)) / (16 * M_PI) < 1e-3);
}

TEST_CASE("transgression") {
    auto dom = cube(3);
    auto grid = dom.grid();
    FormFamily zero{3, 3, [](const Point&) { return std::vector<cplx>{0.0}; }};
    Transgression z = transgress(zero, Homotopy::radial(3), dom, 16);
    CHECK(max_norm(z.theta, grid) == 0.0);
    FormFamily beta{3, 3, [](const Point&) { return std::vector<cplx>{1.0}; }};
    Transgression t = transgress(beta, Homotopy::radial(3), dom, 16);
    CHECK(max_diff(ext_d(t.theta, 1e-3, true), beta, grid) < 1e-5);
    CHECK(t.node_doubling_gap < 1e-10);
    // nonconstant closed 3-form: d(sin(x1 x2) x3 dx1 ^ dx2) = sin(x1 x2) dx1^dx2^dx3
    FormFamily b2{3, 3, [](const Point& x) { return std::vector<cplx>{std::sin(x[0] * x[1])}; }};
    Transgression t2 = transgress(b2, Homotopy::radial(3), dom, 24);
    CHECK(max_diff(ext_d(t2.theta, 1e-3, true), b2, grid) < 1e-5);
    CHECK_THROWS(transgress(beta, Homotopy::radial(3), dom, 8));
}

TEST_CASE("loop-group connection") {
    Loop U, V;
    U.c[0] = TrigPoly(1, {0.3, 0.5, 0.3});
    U.c[1] = TrigPoly(1, {cplx(0, 0.2), 0.1, cplx(0, -0.2)});
    U.c[2] = TrigPoly::constant(0.4);
    V.c[0] = TrigPoly::constant(0.2);
    V.c[1] = TrigPoly(1, {0.5, -0.3, 0.5});
    V.c[2] = TrigPoly(1, {cplx(0, 0.3), 0.0, cplx(0, -0.3)});
    FreedResult r0 = freed_loop_connection(U, V, 0.0, 64);
    CHECK(r0.theta_bandwidth == U.bandwidth());
    for (int sign : {-1, 1}) {
        FreedResult vv = freed_loop_connection(V, V, 0.5, 48, sign);
        CHECK(vv.curvature.matrix().cwiseAbs().maxCoeff() == 0.0);
        FreedResult r = freed_loop_connection(U, V, 0.25, 96, sign);
        CHECK(r.decay_exponent <= -0.5 + 0.3);
        CHECK(r.theta_bandwidth == U.bandwidth());  // diagonal weights do not widen the band
        CHECK(std::abs(r.chern_direct - r.chern_zeta) < 1e-6);
        CHECK(std::abs(r.chern_direct - r.chern_conditioned) < 1e-6);
    }
    CHECK_THROWS_AS(freed_loop_connection(U, V, 0.5, 16), std::invalid_argument);
    Loop W = U;
    W.c[0] = TrigPoly(12);
    W.c[0].set(12, 1.0);
    CHECK_THROWS_AS(freed_loop_connection(W, V, 0.5, 40), std::invalid_argument);
    CHECK_THROWS_AS(freed_loop_connection(U, V, 0.5, 64, 0), std::invalid_argument);
}

TEST_CASE("finite-rank superconnections") {
    auto dom = cube(3, -0.6, 0.7, 3);
    auto grid = dom.grid();
    th::Rng r(46);
    // no odd part: str = tr_even - tr_odd of the ordinary Chern forms
    SuperForm w(3, 2, 1);
    OperatorForm te(3, 1), to(3, 1);
    for (int a = 0; a < 3; ++a) {
        Mat M = Mat::Zero(3, 3);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) M(i, j) = r.c();
        M(2, 2) = r.c();
        Expr g = sin(X((a + 1) % 3)) + X(a) * Expr(r.sym());
        w.add(1u << a, g, M);
        te.add(1u << a, g, mode0_block(M.topLeftCorner(2, 2)));
        to.add(1u << a, g, mode0_block(M.bottomRightCorner(1, 1)));
    }
    ComposeCache c;
    ScalarForms s = super_chern_finite(w, 1, dom);
    ScalarForms fe = finite_chern(te, 1, dom, c), fo = finite_chern(to, 1, dom, c);
    ExprForm diff{3, 2, {}};
    for (unsigned m : subsets(3, 2)) diff.c[m] = s.form.get(m) - fe.form.get(m) + fo.form.get(m);
    CHECK(max_norm(diff.family(), grid) < 1e-13);
    CHECK(max_norm(s.form.family(), grid) > 0.01);

    // constant odd endomorphism, no connection
    SuperForm d(3, 1, 1);
    Mat D(2, 2);
    D << 0.0, 2.0, 0.5, 0.0;
    d.add(0, Expr(1.0), D);
    CHECK(max_norm(super_chern_finite(d, 1, dom).form.family(), grid) == 0.0);

    SuperForm bad(3, 1, 1);
    bad.add(0, Expr(1.0), Mat::Identity(2, 2));
    CHECK_THROWS_AS(super_chern_finite(bad, 1, dom), std::invalid_argument);
    Mat mixed = Mat::Ones(2, 2);
    SuperForm split(3, 1, 1);
    split.add(1, X(0), mixed);
    CHECK(split.terms().size() == 2);
}
