#include "circtrace/acceptance.hpp"

#include "circtrace/geomforms.hpp"
#include "circtrace/scenario.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

namespace ct {

namespace {

// portable uniform on [0,1): the standard distributions are implementation-defined
struct Rng {
    std::mt19937_64 g;
    explicit Rng(std::uint64_t s) : g(s) {}
    double u() { return double(g() >> 11) * 0x1.0p-53; }
    double sym() { return 2.0 * u() - 1.0; }
    cplx c() { return {sym(), sym()}; }
    int pick(int n) { return int(g() % std::uint64_t(n)); }
};

struct Tally {
    double scale;
    bool pass = true;
    double worst = 0.0;
    std::ostringstream detail;

    explicit Tally(double s) : scale(s) { detail << std::setprecision(3); }
    // returns the residual for chaining into the detail line
    double check(double residual, double tol) {
        tol *= scale;
        bool ok = std::isfinite(residual) && residual <= tol;
        pass = pass && ok;
        worst = std::max(worst, std::isfinite(residual) ? (tol > 0 ? residual / tol : (residual > 0 ? INFINITY : 0.0))
                                                        : INFINITY);
        return residual;
    }
    // hard lower bound, not scaled
    void at_least(double v, double lo) {
        if (!(v >= lo)) pass = false;
    }
    template <class T>
    Tally& operator<<(const T& v) {
        detail << v;
        return *this;
    }
};

MatrixTrigPoly mono(int k, cplx v) { return MatrixTrigPoly::monomial(k, Mat::Constant(1, 1, v)); }

MatrixTrigPoly random_mtp(Rng& r, int d, int K) {
    MatrixTrigPoly f(d, K);
    for (int k = -K; k <= K; ++k) {
        Mat m(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) m(i, j) = r.c() / (1.0 + std::abs(k));
        f.set(k, m);
    }
    return f;
}

PhgSymbol random_symbol(Rng& r, double order, int d, int K, int terms = 3, int depth = kDefaultDepth) {
    PhgSymbol s(order, depth, d);
    for (int j = 0; j < terms; ++j) s.add_term(j, 0, random_mtp(r, d, K), random_mtp(r, d, K));
    return s;
}

Patch random_patch(Rng& r, int d, int support, int entries) {
    Patch p(d);
    for (int e = 0; e < entries; ++e) {
        Mat m(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) m(i, j) = r.c();
        p.add(r.pick(2 * support + 1) - support, r.pick(2 * support + 1) - support, m);
    }
    return p;
}

std::vector<Weight> weights() { return {Weight::abs_D(), Weight::laplacian(), Weight::bracket()}; }

// ---------------------------------------------------------------------------

void c1_singular_laws(const AcceptanceOptions& opt, Tally& t) {
    Rng r(opt.seed);
    double wres = 0.0, wlead = 0.0;
    for (int i = 0; i < 50; ++i) {
        const int d = 1 + (i % 2);
        DiscreteOp A(random_symbol(r, 0.0, d, 1 + r.pick(3)), random_patch(r, d, 3, 3));
        DiscreteOp B(random_symbol(r, 0.0, d, 1 + r.pick(3)), random_patch(r, d, 3, 3));
        LeadingFunctional tau;
        tau.weight_plus = TrigPoly(1, {0.2 * r.c(), 0.5 + 0.4 * r.u(), 0.2 * r.c()});
        tau.weight_minus = TrigPoly(1, {0.2 * r.c(), 0.5 + 0.4 * r.u(), 0.2 * r.c()});
        DiscreteOp C = commutator(A, B);
        wres = std::max(wres, t.check(std::abs(residue(C)), 1e-9));
        wlead = std::max(wlead, t.check(std::abs(leading_trace(C, tau)), 1e-12));
    }
    double wp = 0.0;
    for (int i = 0; i < 10; ++i) {
        DiscreteOp P = DiscreteOp::patch_only(random_patch(r, 1 + i % 3, 4, 6));
        wp = std::max({wp, std::abs(residue(P)), std::abs(leading_trace(P))});
    }
    t.check(wp, 0.0);
    t << "max|res[A,B]| " << wres << ", max|tr0[A,B]| " << wlead << ", patch " << wp;
}

void c2_smoothing(const AcceptanceOptions& opt, Tally& t) {
    Rng r(opt.seed + 1);
    double w = 0.0;
    for (int i = 0; i < 5; ++i) {
        Patch p = random_patch(r, 1 + i % 2, 6, 8);
        DiscreteOp P = DiscreteOp::patch_only(p);
        for (const Weight& Q : {Weight::abs_D(), Weight::laplacian(), Weight::bracket().power(1.5)})
            w = std::max(w, t.check(std::abs(weighted_trace(P, Q) - p.trace()), 1e-12));
    }
    t << "max|tr^Q(P) - Tr P| " << w << " over 3 weights";
}

// sum_{n>=1} n^a by direct summation with an Euler-Maclaurin tail from M
double direct_power_sum(double a) {
    const int M = 2000;
    double s = 0.0;
    for (int n = M - 1; n >= 1; --n) s += std::pow(double(n), a);
    const double x = M;
    // int_M^inf + f(M)/2 - sum B_2k/(2k)! f^(2k-1)(M)
    double tail = -std::pow(x, a + 1) / (a + 1) + 0.5 * std::pow(x, a);
    const double B[] = {1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30};
    double fact = 1.0, fall = 1.0;  // (2k)!, a(a-1)...(a-2k+2)
    for (int k = 1; k <= 4; ++k) {
        fact *= double(2 * k - 1) * (2 * k);
        fall = 1.0;
        for (int i = 0; i < 2 * k - 1; ++i) fall *= a - i;
        tail -= B[k - 1] / fact * fall * std::pow(x, a - 2 * k + 1);
    }
    return s + tail;
}

void c3_canonical(const AcceptanceOptions&, Tally& t) {
    double w = 0.0;
    for (double a : {-2.0, -3.0, -1.5}) {
        // the off-diagonal part must not contribute
        PhgSymbol s = PhgSymbol::power(a);
        s.add_term(0, 0, mono(1, 0.3), mono(-2, 0.7));
        DiscreteOp A(s);
        w = std::max(w, t.check(std::abs(canonical_trace(A) - 2.0 * direct_power_sum(a)), 1e-10));
    }
    double e = t.check(std::abs(weighted_trace(DiscreteOp(PhgSymbol::power(-2.0)), Weight::abs_D()) - M_PI * M_PI / 3),
                       1e-10);
    t << "max|TR - direct| " << w << ", |tr^Q(|xi|^-2) - pi^2/3| " << e;
}

void c4_kv(const AcceptanceOptions& opt, Tally& t) {
    Rng r(opt.seed + 3);
    std::vector<DiscreteOp> ops;
    const MatrixTrigPoly none(1, 0);
    ops.push_back(DiscreteOp(PhgSymbol::power(-1.0)));
    ops.push_back(DiscreteOp::identity());
    ops.push_back(DiscreteOp(PhgSymbol::power(1.0)));
    ops.push_back(builtin_operator("hardy_projection"));
    ops.push_back(DiscreteOp(PhgSymbol::term(-1.0, mono(0, 2.0), none)));
    ops.push_back(compose(DiscreteOp(random_symbol(r, 0.0, 1, 2)), DiscreteOp(PhgSymbol::term(1.0, mono(0, 1.0), none))));
    ops.push_back(compose(builtin_operator("abs"), DiscreteOp(random_symbol(r, 0.0, 1, 2))));
    ops.push_back(compose(builtin_operator("inv_abs"), DiscreteOp(random_symbol(r, 0.0, 1, 3))));
    ops.push_back(DiscreteOp(random_symbol(r, 0.0, 1, 3), random_patch(r, 1, 3, 4)));
    ops.push_back(compose(DiscreteOp(random_symbol(r, 0.0, 2, 2)), DiscreteOp::identity(2) * cplx(1.0)) +
                  DiscreteOp(random_symbol(r, -1.0, 2, 1)));
    ops.push_back(compose(DiscreteOp::multiplication(mono(1, 1.0) + mono(0, 3.0)), builtin_operator("inv_abs")) +
                  builtin_operator("hardy_down"));
    ops.push_back(builtin_operator("sign") + DiscreteOp::patch_only(random_patch(r, 1, 2, 3)));
    auto W = weights();
    double wk = 0.0, wo = 0.0, big = 0.0;
    for (size_t i = 0; i < ops.size(); ++i) {
        const Weight& Q = W[i % W.size()];
        cplx target = residue(ops[i]) / Q.order();
        big = std::max(big, std::abs(target));
        wk = std::max(wk, t.check(std::abs(kv_pole_check(ops[i], Q).residue - target), 1e-8));
        wo = std::max(wo, t.check(std::abs(spectral_zeta_laurent(ops[i], Q, kMaxDenseWindow).residue - target), 1e-8));
    }
    t << ops.size() << " operators, max|Res Z - res/q| kv " << wk << ", oracle " << wo << " (largest res/q " << big
      << ")";
}

void c5_hochschild(const AcceptanceOptions& opt, Tally& t) {
    DefectPair wk = hochschild_defect(builtin_operator("worked_A"), builtin_operator("worked_B"), Weight::abs_D());
    double e1 = t.check(std::max(std::abs(wk.lhs - 1.0), std::abs(wk.rhs - 1.0)), 1e-10);
    Rng r(opt.seed + 4);
    auto W = weights();
    double w = 0.0;
    int large = 0;
    for (int i = 0; i < 20; ++i) {
        DiscreteOp A(random_symbol(r, double(r.pick(2)), 1, 1 + r.pick(2)), random_patch(r, 1, 2, 2));
        DiscreteOp B(random_symbol(r, 0.0, 1, 1 + r.pick(2)));
        DefectPair d = hochschild_defect(A, B, W[i % 3]);
        w = std::max(w, t.check(std::abs(d.lhs - d.rhs), 1e-7));
        if (std::abs(d.lhs) >= 0.05) ++large;
    }
    t.at_least(large, 5);
    t << "worked |lhs-1|,|rhs-1| " << e1 << ", random max|lhs-rhs| " << w << ", " << large << "/20 with |lhs|>=0.05";
}

void c6_weights(const AcceptanceOptions& opt, Tally& t) {
    Rng r(opt.seed + 5);
    std::vector<DiscreteOp> ops = {DiscreteOp(random_symbol(r, 0.0, 1, 2), random_patch(r, 1, 2, 3)),
                                   DiscreteOp(random_symbol(r, 1.0, 1, 1)), builtin_operator("inv_abs"),
                                   builtin_operator("hardy_up")};
    double wp = 0.0, wc = 0.0, wg = 0.0;
    for (auto& A : ops)
        for (const Weight& Q : weights()) {
            cplx base = weighted_trace(A, Q);
            for (double p : {2.0, 3.0, 0.5}) wp = std::max(wp, t.check(std::abs(weighted_trace(A, Q.power(p)) - base), 1e-9));
        }
    auto W = weights();
    for (auto& A : ops)
        for (int i = 0; i < 3; ++i) {
            DefectPair d = weight_change_defect(A, W[i], W[(i + 1) % 3]);
            wc = std::max(wc, t.check(std::abs(d.lhs - d.rhs), 1e-8));
        }
    // banded gauge: shift times a unipotent factor
    Patch n(1);
    n.add(1, -1, Mat::Constant(1, 1, 0.6));
    n.add(2, 0, Mat::Constant(1, 1, -0.3));
    DiscreteOp C = compose(DiscreteOp::multiplication(mono(1, 1.0)), DiscreteOp::identity() + DiscreteOp::patch_only(n));
    for (auto& A : ops)
        for (const Weight& Q : W) {
            DiscreteOp B = gauge_conjugate(A, C);
            wg = std::max(wg, t.check(std::abs(weighted_trace(B, Q.conjugated(C)) - weighted_trace(A, Q)), 1e-8));
        }
    t << "powers " << wp << ", weight change " << wc << ", gauge covariance " << wg;
}

void c7_dimension(const AcceptanceOptions&, Tally& t) {
    double e0 = t.check(std::abs(weighted_trace(DiscreteOp::identity(), Weight::abs_D())), 1e-10);
    cplx v = weighted_trace(builtin_operator("inv_abs"), Weight::abs_D());
    double e1 = t.check(std::abs(v - 2.0 * euler_gamma()), 1e-9);
    // a(N) = 2(H_N - log N) = 2 gamma + c1/N + c2/N^2 + ...; two Richardson levels
    auto a = [](int N) {
        double h = 0.0;
        for (int n = N; n >= 1; --n) h += 1.0 / n;
        return 2.0 * (h - std::log(double(N)));
    };
    const int N = 4000;
    double a1 = a(N), a2 = a(2 * N), a4 = a(4 * N);
    double r1 = 2 * a2 - a1, r2 = 2 * a4 - a2;
    double ext = (4 * r2 - r1) / 3;
    double e2 = t.check(std::abs(v - ext), 1e-6);
    t << "tr^Q(I) " << e0 << ", |tr^Q(|xi|^-1) - 2 gamma| " << e1 << ", vs partial sums " << e2;
}

Expr X(int i) { return Expr::var(i); }

void c8_finite_chern(const AcceptanceOptions& opt, Tally& t) {
    Rng r(opt.seed + 7);
    ParamDomain dom;
    dom.dim = 3;
    for (int a = 0; a < 3; ++a) dom.lo[a] = -0.6, dom.hi[a] = 0.7;
    dom.points = 4;
    auto grid = dom.grid();
    auto coef = [&] {
        Expr e(r.sym());
        for (int a = 0; a < 3; ++a) e = e + Expr(r.sym()) * sin(X(a) * Expr(1.5 * r.sym())) + Expr(0.5 * r.sym()) * X(a) * X((a + 1) % 3);
        return e;
    };
    auto anti = [&](bool traceless) {
        Mat M(2, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) M(i, j) = r.c();
        M = (M - M.adjoint()).eval() * 0.5;
        if (traceless) M -= Mat::Identity(2, 2) * (M.trace() / 2.0);
        return M;
    };
    double wd[2], wf[2];
    for (int u = 0; u < 2; ++u) {
        OperatorForm th(3, 1);
        for (int a = 0; a < 3; ++a)
            for (int k = 0; k < 2; ++k) th.add(1u << a, coef(), mode0_block(anti(u == 0)));
        ComposeCache c;
        ScalarForms f = finite_chern(th, 1, dom, c);
        wd[u] = t.check(max_norm(f.dform, grid), 1e-6);
        wf[u] = max_norm(f.form.family(), grid);
    }
    // tautological line bundle on the sphere, chart (polar, azimuth)
    ParamDomain sd;
    sd.dim = 2;
    sd.lo = {0.0, 0.0};
    sd.hi = {M_PI, 2 * M_PI};
    OperatorForm th(2, 1);
    auto one = std::make_shared<const DiscreteOp>(mode0_block(Mat::Identity(1, 1)));
    th.add(1, -cos(X(0) * Expr(0.5)) / sin(X(0) * Expr(0.5)) * Expr(0.5), one);
    th.add(2, Expr(cplx(0, 1)) * pow(cos(X(0) * Expr(0.5)), Expr(2.0)), one);
    ComposeCache c;
    cplx I = integrate_2form(finite_chern(th, 1, sd, c).form.family(), sd, 48);
    const cplx target(0.0, -2 * M_PI);
    double e = t.check(std::abs(I - target) / std::abs(target), 1e-3);
    t << "su(2) |d tr Omega| " << wd[0] << " (form " << wf[0] << "), u(2) " << wd[1] << " (form " << wf[1]
      << "), sphere rel err " << e;
}

void c9_hardy(const AcceptanceOptions&, Tally& t) {
    ParamDomain dom;
    dom.dim = 3;
    for (int a = 0; a < 3; ++a) dom.lo[a] = -0.7, dom.hi[a] = 0.8;
    dom.points = 4;
    auto grid = dom.grid();
    Expr f1 = Expr(1.0) + Expr(0.5) * sin(X(2)) + Expr(0.3) * X(0), f2 = cos(X(2)) * Expr(0.8) + Expr(0.2) * X(1) * X(2);
    OperatorForm th(3, 1);
    th.add(1, f1, builtin_operator("hardy_up"));
    th.add(2, f2, builtin_operator("hardy_down"));
    ExprForm expect{3, 2, {}};
    expect.c[3] = -(f1 * f2);
    ComposeCache cache;
    double wt = 0.0, wb = 0.0, wprinted = INFINITY, peak = INFINITY;
    for (const Weight& Q : weights()) {
        DefectForms d = weighted_chern_defect(th, Q, 1, dom, cache);
        wt = std::max(wt, t.check(max_diff(d.trace_form.family(), expect.family(), grid), 1e-12));
        wb = std::max(wb, t.check(max_diff(d.lhs, d.rhs.family(), grid), 1e-8));
        wprinted = std::min(wprinted, max_diff(d.lhs, d.printed_rhs.family(), grid));
        peak = std::min(peak, max_norm(d.lhs, grid));
    }
    t.at_least(peak, 0.1);
    t << "|tr^Q(Omega) + f1 f2| " << wt << ", |d tr^Q - res side| " << wb << ", peak " << peak
      << "; residual with the opposite (printed) sign " << wprinted;
}

void c10_grassmann(const AcceptanceOptions&, Tally& t) {
    // Pauli family n(x).sigma, n a degree-one sphere map at each fixed x3
    ParamDomain pd;
    pd.dim = 3;
    pd.lo = {0.0, 0.0, 0.2};
    pd.hi = {M_PI, 2 * M_PI, 0.9};
    pd.points = 4;
    auto pgrid = pd.grid();
    Expr ph = X(1) + X(2) * cos(X(0));
    Expr n[3] = {sin(X(0)) * cos(ph), sin(X(0)) * sin(ph), cos(X(0))};
    GradingFamily fam{OperatorForm(3, 0), OperatorForm(3, 1)};
    for (int a = 0; a < 3; ++a) fam.F.add(0, n[a], builtin_operator(a == 0 ? "pauli_x" : a == 1 ? "pauli_y" : "pauli_z"));
    fam.dF = fam.F.d();
    ComposeCache cache;
    GrassmannForms g = grassmann_forms(fam, Weight::abs_D(), 1, pd, cache);
    double ec = t.check(max_norm(g.domega, pgrid), 1e-6);
    cplx I = integrate_2form(g.omega, pd, 64);
    // brute-force oracle: tr(F dF dF) = 4i n.(d1 n x d2 n) dx1 dx2, midpoint rule, difference quotients
    auto nv = [](double a, double b, double c) {
        double p = b + c * std::cos(a);
        return std::array<double, 3>{std::sin(a) * std::cos(p), std::sin(a) * std::sin(p), std::cos(a)};
    };
    const int M = 600;
    const double ha = M_PI / M, hb = 2 * M_PI / M, e = 1e-5, c3 = pd.lo[2];
    double acc = 0.0;
    for (int i = 0; i < M; ++i)
        for (int k = 0; k < M; ++k) {
            double a = (i + 0.5) * ha, b = (k + 0.5) * hb;
            auto v = nv(a, b, c3), pa = nv(a + e, b, c3), ma = nv(a - e, b, c3), pb = nv(a, b + e, c3),
                 mb = nv(a, b - e, c3);
            double da[3], db[3];
            for (int q = 0; q < 3; ++q) da[q] = (pa[q] - ma[q]) / (2 * e), db[q] = (pb[q] - mb[q]) / (2 * e);
            acc += v[0] * (da[1] * db[2] - da[2] * db[1]) + v[1] * (da[2] * db[0] - da[0] * db[2]) +
                   v[2] * (da[0] * db[1] - da[1] * db[0]);
        }
    const cplx oracle(0.0, 4.0 * acc * ha * hb);
    double ei = t.check(std::abs(I - oracle) / std::abs(oracle), 1e-3);

    // conjugation of the Hardy grading by a unipotent banded family
    ParamDomain dom;
    dom.dim = 3;
    for (int a = 0; a < 3; ++a) dom.lo[a] = -0.7, dom.hi[a] = 0.8;
    dom.points = 4;
    auto grid = dom.grid();
    Patch n1(1), n2(1);
    n1.add(1, -1, Mat::Constant(1, 1, 0.7));
    n1.add(2, -1, Mat::Constant(1, 1, 0.3));
    n2.add(-1, 1, Mat::Constant(1, 1, 1.1));
    n2.add(-1, 2, Mat::Constant(1, 1, 0.4));
    std::vector<std::pair<Expr, DiscreteOp>> fac{{sin(X(0)) + X(1), DiscreteOp::patch_only(n1)},
                                                 {cos(X(1) * X(2)) + X(0) * X(2), DiscreteOp::patch_only(n2)}};
    GradingFamily cf = conjugation_family(builtin_operator("sign"), fac, 3, cache);
    std::vector<GrassmannForms> gs;
    for (const Weight& Q : weights()) gs.push_back(grassmann_forms(cf, Q, 1, dom, cache));
    double eq = 0.0;
    for (size_t i = 1; i < gs.size(); ++i) eq = std::max(eq, t.check(max_diff(gs[0].omega, gs[i].omega, grid), 1e-10));
    double ed = t.check(max_norm(gs[0].domega, grid), 1e-6);
    double er = t.check(max_diff(gs[0].domega, gs[0].residue_side, grid), 1e-6);
    double peak = max_norm(gs[0].omega, grid);
    t.at_least(peak, 0.1);

    FormFamily beta{3, 3, [](const Point&) { return std::vector<cplx>{1.0}; }};
    Transgression T = transgress(beta, Homotopy::radial(3), dom, 16);
    double et = t.check(max_diff(ext_d(T.theta, dom.h, true), beta, grid), 1e-5);
    t << "Pauli closed " << ec << ", integral rel err " << ei << " (oracle " << oracle.imag() << "i)"
      << "; conjugation Q-indep " << eq << ", closed " << ed << ", vs residue " << er << ", peak " << peak
      << "; transgression " << et;
}

void c11_freed(const AcceptanceOptions&, Tally& t) {
    Loop U, V;
    U.c[0] = TrigPoly(1, {0.3, 0.5, 0.3});
    U.c[1] = TrigPoly(1, {cplx(0, 0.2), 0.1, cplx(0, -0.2)});
    U.c[2] = TrigPoly::constant(0.4);
    V.c[0] = TrigPoly::constant(0.2);
    V.c[1] = TrigPoly(1, {0.5, -0.3, 0.5});
    V.c[2] = TrigPoly(1, {cplx(0, 0.3), 0.0, cplx(0, -0.3)});
    std::ostringstream var;
    var << std::setprecision(3);
    for (int sign : {-1, 1}) {
        // the verdict follows the literal third term; the variant is reported alongside
        Tally local(t.scale);
        Tally& k = sign == -1 ? t : local;
        (sign == -1 ? t.detail : var) << (sign == -1 ? "literal:" : "; variant:");
        for (double s : {0.25, 0.5, 1.0}) {
            FreedResult r = freed_loop_connection(U, V, s, 128, sign);
            FreedResult vv = freed_loop_connection(V, V, s, 64, sign);
            double bound = std::max(-1.0, -2.0 * s) + 0.3;
            k.check(std::max(0.0, r.decay_exponent - bound), 0.0);
            double agree = std::max({std::abs(r.chern_direct - r.chern_conditioned),
                                     std::abs(r.chern_direct - r.chern_zeta),
                                     std::abs(r.chern_conditioned - r.chern_zeta)});
            k.check(agree, 1e-6);
            double z = vv.curvature.matrix().cwiseAbs().maxCoeff();
            k.check(z, 0.0);
            (sign == -1 ? t.detail : var) << " s=" << s << " decay " << r.decay_exponent << " (<= " << bound
                                          << ") agree " << agree << " VV " << z;
        }
        if (sign == 1) var << (local.pass ? " [pass]" : " [fail]");
    }
    t << var.str() << "; c1 " << freed_loop_connection(U, V, 0.5, 128).chern_direct.real();
}

void c12_super(const AcceptanceOptions& opt, Tally& t) {
    Rng r(opt.seed + 11);
    auto coef = [&](int p) {
        Expr e(r.sym());
        for (int a = 0; a < p; ++a)
            e = e + Expr(r.sym()) * sin(X(a) * Expr(1.5 * r.sym())) + Expr(0.5 * r.sym()) * X(a) * X((a + 1) % p);
        return e;
    };
    auto block = [&](bool odd) {
        Mat M(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) M(i, j) = ((i < 2) != (j < 2)) == odd ? r.c() : cplx(0.0);
        return M;
    };
    double wd = 0.0, peak = INFINITY;
    for (int trial = 0; trial < 4; ++trial) {
        const int p = trial < 3 ? 3 : 4, j = trial < 3 ? 1 : 2;
        ParamDomain dom;
        dom.dim = p;
        for (int a = 0; a < p; ++a) dom.lo[a] = -0.6, dom.hi[a] = 0.7;
        dom.points = p == 3 ? 4 : 3;
        SuperForm w(p, 2, 2);
        for (int a = 0; a < p; ++a) w.add(1u << a, coef(p), block(false));
        for (int k = 0; k < 2; ++k) w.add(0, coef(p), block(true));
        ScalarForms f = super_chern_finite(w, j, dom);
        auto grid = dom.grid();
        wd = std::max(wd, t.check(max_norm(f.dform, grid), 1e-6));
        peak = std::min(peak, max_norm(f.form.family(), grid));
    }
    t.at_least(peak, 1e-3);
    t << "max|d str| " << wd << " over 3 families on R^3 (j=1) and one on R^4 (j=2), smallest form peak " << peak;
}

using Fn = void (*)(const AcceptanceOptions&, Tally&);
struct Entry {
    const char* title;
    Fn fn;
};
const Entry kTable[kCriteria] = {
    {"singular-trace laws", c1_singular_laws},
    {"smoothing extension", c2_smoothing},
    {"canonical-trace consistency", c3_canonical},
    {"KV pole identity", c4_kv},
    {"Hochschild defect", c5_hochschild},
    {"weight laws", c6_weights},
    {"regularized dimension", c7_dimension},
    {"finite-dimensional Chern-Weil", c8_finite_chern},
    {"Hardy gauge anomaly", c9_hardy},
    {"Grassmannian forms", c10_grassmann},
    {"loop-group connection", c11_freed},
    {"finite-rank superconnection", c12_super},
};

}  // namespace

std::string criterion_title(int id) {
    if (id < 1 || id > kCriteria) throw std::out_of_range("criterion id");
    return kTable[id - 1].title;
}

CriterionResult run_criterion(int id, const AcceptanceOptions& opt) {
    CriterionResult res;
    res.id = id;
    res.title = criterion_title(id);
    Tally t(opt.tolerance_scale);
    auto t0 = std::chrono::steady_clock::now();
    try {
        kTable[id - 1].fn(opt, t);
        res.pass = t.pass;
        res.detail = t.detail.str();
    } catch (const std::exception& e) {
        res.pass = false;
        res.detail = t.detail.str() + " exception: " + e.what();
    }
    res.worst = t.worst;
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt) {
    std::vector<CriterionResult> out;
    for (int i = 1; i <= kCriteria; ++i) out.push_back(run_criterion(i, opt));
    return out;
}

std::string format_result(const CriterionResult& r) {
    std::ostringstream os;
    os << (r.pass ? "[PASS] " : "[FAIL] ") << std::setw(2) << r.id << ' ' << r.title << "  worst "
       << std::setprecision(3) << r.worst << "  (" << std::fixed << std::setprecision(2) << r.seconds << " s)  | "
       << r.detail;
    return os.str();
}

}  // namespace ct
