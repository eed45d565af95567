#include "circtrace/json_io.hpp"
#include "circtrace/kernels.hpp"
#include "circtrace/oracle.hpp"
#include "circtrace/weight.hpp"
#include "helpers.hpp"

#include <doctest.h>

using namespace ct;
using th::mono;

namespace {

DiscreteOp op_e(int k) { return DiscreteOp(PhgSymbol::term(0.0, mono(k, 1.0), mono(k, 1.0))); }

PhgSymbol plus_const(PhgSymbol s, int j, cplx c) {
    s.add_term(j, 0, mono(0, c), mono(0, c));
    return s;
}

}  // namespace

TEST_CASE("trig polynomials") {
    TrigPoly a(1, {1.0, 2.0, 3.0}), b = TrigPoly::monomial(2, cplx(0, 1));
    TrigPoly p = a * b;
    CHECK(p.bandwidth() == 3);
    CHECK(p.coeff(3) == cplx(0, 3));
    CHECK(p.coeff(1) == cplx(0, 1));
    const double x = 0.37;
    CHECK(std::abs(p.eval(x) - a.eval(x) * b.eval(x)) < 1e-14);
    CHECK(std::abs(a.derivative().eval(x) - (cplx(0, -1) * std::exp(cplx(0, -x)) + cplx(0, 3) * std::exp(cplx(0, x)))) <
          1e-14);
    CHECK(TrigPoly(1, {cplx(1, 1), 0.5, cplx(1, -1)}).is_real(1e-15));
}

TEST_CASE("star product of x-independent factors is a single product") {
    PhgSymbol s = star_product(PhgSymbol::power(1.0), PhgSymbol::power(-2.0), kDefaultDepth).pruned();
    REQUIRE(s.terms().size() == 1);
    CHECK(s.degree(s.terms()[0]) == doctest::Approx(-1.0));
    CHECK(std::abs(s.eval(0.3, 5.0)(0, 0) - 0.2) < 1e-15);
}

TEST_CASE("|xi| composed with e^{ix}: two terms, entries |n+1|") {
    PhgSymbol s = star_product(PhgSymbol::power(1.0), op_e(1).symbol(), kDefaultDepth).pruned(1e-15);
    CHECK(s.terms().size() == 2);
    DiscreteOp C = compose(DiscreteOp(PhgSymbol::power(1.0)), op_e(1));
    for (int n = -20; n <= 20; ++n)
        if (n != 0) CHECK(std::abs(C.entry(n + 1, n)(0, 0) - double(std::abs(n + 1))) < 1e-13);
}

TEST_CASE("Taylor shift: e^{-ix}|xi|^a after e^{ix}") {
    for (double a : {-1.5, 0.5, 2.0}) {
        DiscreteOp A(PhgSymbol::term(a, mono(-1, 1.0), mono(-1, 1.0)));
        DiscreteOp C = compose(A, op_e(1));
        for (int n : {-40, -25, -12, 12, 25, 40}) {
            double exact = std::pow(std::abs(n + 1.0), a);
            CHECK(std::abs(C.entry(n, n)(0, 0) - exact) <= 1e-8 * exact);
        }
        CHECK(brute_compose_check(A, op_e(1), 32) <= 1e-12);
    }
}

TEST_CASE("commutator examples") {
    DiscreteOp M1(PhgSymbol::power(-1.0)), M2(plus_const(PhgSymbol::power(2.0), 2, 3.0));
    DiscreteOp Z = commutator(M1, M2);
    CHECK(Z.symbol().is_zero(1e-15));
    CHECK(Z.patch().pruned(1e-15).empty());

    DiscreteOp A(PhgSymbol::term(1.0, mono(-1, 1.0), mono(-1, 1.0)));
    DiscreteOp D = commutator(A, op_e(1));
    for (int n = -15; n <= 15; ++n) {
        // |n+1| - |n|, except that the column n = 0 of op_e(1) is zero, which doubles the n = 1 entry and kills n = 0
        double want = n >= 0 ? 1.0 : -1.0;
        if (n == 1) want = 2.0;
        if (n == 0) want = 0.0;
        CHECK(std::abs(D.entry(n, n)(0, 0) - want) < 1e-13);
    }

    DiscreteOp H = commutator(th::hardy_up(), th::hardy_down());
    CHECK(H.symbol().is_zero(1e-15));
    Patch P1(1);
    P1.add(1, 1, Mat::Constant(1, 1, 1.0));
    CHECK(th::max_entry(H + DiscreteOp::patch_only(P1), 30) == 0.0);
}

TEST_CASE("parametrix") {
    const int depth = kDefaultDepth;
    PhgSymbol s2 = PhgSymbol::power(2.0);
    PhgSymbol p = parametrix(s2, depth).pruned(1e-15);
    REQUIRE(p.terms().size() == 1);
    CHECK(p.degree(p.terms()[0]) == doctest::Approx(-2.0));

    PhgSymbol s = plus_const(PhgSymbol::power(2.0), 2, 1.0);
    PhgSymbol q = parametrix(s, depth);
    double sign = 1.0;
    for (int j = 0; j < depth; j += 2, sign = -sign) {
        auto* t = q.find(j, 0);
        REQUIRE(t);
        CHECK(std::abs(t->plus.coeff(0)(0, 0) - sign) < 1e-14);
    }
    CHECK((star_product(s, q, depth) - PhgSymbol::identity()).is_zero(1e-13));

    PhgSymbol r(1.0, depth, 1);
    r.add_term(0, 0, mono(0, 1.0), mono(0, 1.0));
    r.add_term(1, 0, mono(1, 1.0), mono(1, 1.0));
    PhgSymbol rp = parametrix(r, depth);
    CHECK(rp.order() == doctest::Approx(-1.0));
    CHECK(std::abs(rp.find(1, 0)->plus.coeff(1)(0, 0) + 1.0) < 1e-14);
    CHECK((star_product(r, rp, depth) - PhgSymbol::identity()).is_zero(1e-12));
    CHECK((star_product(rp, r, depth) - PhgSymbol::identity()).is_zero(1e-12));
}

TEST_CASE("star product is associative up to the truncation") {
    th::Rng r(11);
    for (int i = 0; i < 5; ++i) {
        int d = 1 + i % 2;
        PhgSymbol a = th::random_symbol(r, 0.0, d, 2), b = th::random_symbol(r, 1.0, d, 1),
                  c = th::random_symbol(r, -1.0, d, 2);
        PhgSymbol lhs = star_product(star_product(a, b, 8), c, 8), rhs = star_product(a, star_product(b, c, 8), 8);
        CHECK((lhs - rhs).is_zero(1e-11));
    }
}

TEST_CASE("mode-matrix faithfulness on random banded pairs") {
    th::Rng r(12);
    for (int i = 0; i < 6; ++i) {
        int d = 1 + i % 2;
        DiscreteOp A(th::random_symbol(r, double(i % 3) - 1.0, d, 1 + r.pick(3)), th::random_patch(r, d, 3, 3));
        DiscreteOp B(th::random_symbol(r, 0.0, d, 1 + r.pick(3)), th::random_patch(r, d, 3, 2));
        CHECK(brute_compose_check(A, B, 96) <= 1e-12);
    }
}

TEST_CASE("log weight expansions") {
    PhgSymbol L = log_weight(Weight::abs_D()).pruned(1e-15);
    REQUIRE(L.terms().size() == 1);
    CHECK(L.terms()[0].logpow == 1);
    PhgSymbol L3 = log_weight(Weight::abs_D().power(3.0)).pruned(1e-15);
    CHECK(std::abs(L3.terms()[0].plus.coeff(0)(0, 0) - 3.0) < 1e-15);
    // q = |xi|^2 + 1
    PhgSymbol Lb = log_weight(Weight::bracket().power(2.0), 12);
    for (double xi : {4.0, 9.0, -6.0}) {
        // alternating tail: first omitted term of log(1 + 1/xi^2) is xi^-12 / 6
        CHECK(std::abs(Lb.eval(0.1, xi)(0, 0) - std::log(xi * xi + 1)) < 1.0 / (6.0 * std::pow(xi, 12)));
    }
    CHECK(std::abs(Lb.find(2, 0)->plus.coeff(0)(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(Lb.find(4, 0)->plus.coeff(0)(0, 0) + 0.5) < 1e-15);
}

TEST_CASE("gauge conjugation") {
    th::Rng r(13);
    DiscreteOp A(th::random_symbol(r, 0.0, 1, 2), th::random_patch(r, 1, 2, 2));
    DiscreteOp I = gauge_conjugate(A, DiscreteOp::identity());
    CHECK(th::max_entry(I - A, 20) < 1e-15);

    DiscreteOp a(plus_const(PhgSymbol::power(-1.0), 2, 0.5));
    DiscreteOp S = DiscreteOp::multiplication(mono(1, 1.0));
    DiscreteOp B = gauge_conjugate(a, S);
    for (int n : {3, 7, 20, -5, -30}) {
        double m = std::abs(n + 1.0);
        CHECK(std::abs(B.entry(n, n)(0, 0) - (1.0 / m + 0.5 / (m * m * m))) < 1e-9 / m);
    }

    Patch N(1);
    N.add(1, -1, Mat::Constant(1, 1, 0.6));
    DiscreteOp C = compose(S, DiscreteOp::identity() + DiscreteOp::patch_only(N));
    DiscreteOp Ci = exact_inverse(C);
    CHECK(th::max_entry(compose(C, Ci) - DiscreteOp::identity(), 40) < 1e-13);
    for (int i = 0; i < 4; ++i) {
        DiscreteOp X(th::random_symbol(r, double(i) - 1.0, 1, 2), th::random_patch(r, 1, 2, 2));
        DiscreteOp Y = gauge_conjugate(X, C);
        CHECK(Y.order() == doctest::Approx(X.order()));
        CHECK(std::abs(residue(Y) - residue(X)) < 1e-10);
    }
}

TEST_CASE("operator JSON round trip and strict schema") {
    th::Rng r(14);
    DiscreteOp A(th::random_symbol(r, 0.5, 2, 2), th::random_patch(r, 2, 2, 3));
    Json j = to_json(A);
    DiscreteOp B = op_from_json(Json::parse(j.dump()));
    CHECK(th::max_entry(A - B, 20) == 0.0);

    Json bad = j;
    bad["colour"] = 1;
    CHECK_THROWS_WITH_AS(op_from_json(bad, "op"), doctest::Contains("op.colour"), InputError);
    Json bad2 = j;
    bad2["terms"][0]["plus"]["K"] = "two";
    CHECK_THROWS_AS(op_from_json(bad2), InputError);
    Json bad3 = j;
    bad3["patch"][0] = Json::array({1, 2});
    CHECK_THROWS_WITH_AS(op_from_json(bad3), doctest::Contains("patch[0]"), InputError);
}

TEST_CASE("OpenMP kernels agree with the serial references") {
    th::Rng r(15);
    DiscreteOp A(th::random_symbol(r, 1.0, 2, 3), th::random_patch(r, 2, 4, 5));
    Mat s = kernels::assemble_serial(A, 60), p = kernels::assemble_omp(A, 60);
    CHECK((s - p).cwiseAbs().maxCoeff() == 0.0);
    Mat B = kernels::assemble_serial(DiscreteOp(th::random_symbol(r, 0.0, 2, 2)), 60);
    CHECK((kernels::matmul_serial(s, B) - kernels::matmul_omp(s, B)).cwiseAbs().maxCoeff() <= 1e-12);
    std::vector<cplx> d(5000);
    std::vector<double> w(5000);
    for (size_t i = 0; i < d.size(); ++i) d[i] = r.c(), w[i] = r.u();
    cplx ws = kernels::weighted_diag_sum_serial(d, w), wp = kernels::weighted_diag_sum_omp(d, w);
    CHECK(std::abs(ws - wp) <= 1e-13 * std::abs(ws));
    // chunked partials are combined in a fixed order
    CHECK(kernels::weighted_diag_sum_omp(d, w) == wp);
}
