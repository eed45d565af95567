#include "circtrace/oracle.hpp"
#include "circtrace/traces.hpp"
#include "helpers.hpp"

#include <doctest.h>

using namespace ct;
using th::mono;

namespace {

const double kGamma = 0.57721566490153286;

DiscreteOp pw(double a) { return DiscreteOp(PhgSymbol::power(a)); }

// sum_{n>=0} (n+a)^{-s} from M on: Euler-Maclaurin with four Bernoulli corrections
double em_tail(double s, double a, int M) {
    const double x = M + a;
    double t = std::pow(x, 1 - s) / (s - 1) + 0.5 * std::pow(x, -s);
    const double B[] = {1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30};
    double fact = 1.0;
    for (int k = 1; k <= 4; ++k) {
        fact *= double(2 * k - 1) * (2 * k);
        double fall = 1.0;  // d^{2k-1}/dx^{2k-1} x^{-s} = (-s)(-s-1)... x^{-s-2k+1}
        for (int i = 0; i < 2 * k - 1; ++i) fall *= -s - i;
        t -= B[k - 1] / fact * fall * std::pow(x, -s - 2 * k + 1);
    }
    return t;
}

}  // namespace

TEST_CASE("zeta values") {
    CHECK(std::abs(zeta(2.0).value - M_PI * M_PI / 6) < 1e-14);
    CHECK(std::abs(zeta(0.0).value + 0.5) < 1e-14);
    CHECK(std::abs(zeta(-1.0).value + 1.0 / 12) < 1e-14);
    CHECK_THROWS_AS(zeta(1.0), std::domain_error);
    // sum_{n<=N} n^{-1/2} - 2 sqrt N - N^{-1/2}/2 -> zeta(1/2), error O(N^{-3/2})
    const int N = 1000000;
    double s = 0.0;
    for (int n = N; n >= 1; --n) s += 1.0 / std::sqrt(double(n));
    double ext = s - 2 * std::sqrt(double(N)) - 0.5 / std::sqrt(double(N));
    CHECK(std::abs(zeta(0.5).value.real() - ext) < 1e-8);
}

TEST_CASE("Hurwitz zeta against direct sums with an independent tail") {
    for (double s : {1.5, 3.0, 4.25})
        for (double a : {0.3, 1.0, 2.7}) {
            const int M = 60;
            double direct = 0.0;
            for (int n = 0; n < M; ++n) direct += std::pow(n + a, -s);
            CHECK(std::abs(zeta(s, a).value.real() - direct - em_tail(s, a, M)) <= 1e-12);
        }
}

TEST_CASE("Stieltjes constants") {
    CHECK(std::abs(stieltjes(0) - kGamma) < 1e-13);
    CHECK(std::abs(euler_gamma() - kGamma) < 1e-13);
    CHECK(std::abs(stieltjes(1) + 0.0728158454836767249) < 1e-12);
}

TEST_CASE("residue") {
    CHECK(std::abs(residue(pw(-1.0)) - 2.0) < 1e-15);
    PhgSymbol s = PhgSymbol::power(2.0);
    s.add_term(2, 0, mono(0, 1.0), mono(0, 1.0));
    CHECK(residue(DiscreteOp(parametrix(s, 8))) == 0.0);
    th::Rng r(21);
    for (int i = 0; i < 10; ++i) {
        DiscreteOp A(th::random_symbol(r, 0.0, 1 + i % 2, 3)), B(th::random_symbol(r, 0.0, 1 + i % 2, 2));
        CHECK(std::abs(residue(commutator(A, B))) <= 1e-9);
        CHECK(std::abs(leading_trace(commutator(A, B))) <= 1e-12);
    }
    DiscreteOp P = DiscreteOp::patch_only(th::random_patch(r, 2, 3, 5));
    CHECK(residue(P) == 0.0);
    CHECK(leading_trace(P) == 0.0);
}

TEST_CASE("leading trace") {
    CHECK(std::abs(leading_trace(DiscreteOp::identity()) - 1.0) < 1e-15);
    CHECK(std::abs(leading_trace(DiscreteOp(PhgSymbol::term(0.0, mono(1, 1.0), mono(1, 1.0))))) < 1e-15);
}

TEST_CASE("canonical trace") {
    CHECK(std::abs(canonical_trace(pw(-2.0)) - M_PI * M_PI / 3) < 1e-12);
    CHECK(std::abs(canonical_trace(pw(-0.5)) - 2.0 * zeta(0.5).value) < 1e-12);
    Patch p(1);
    p.add(0, 0, Mat::Constant(1, 1, 1.0));
    p.add(1, 1, Mat::Constant(1, 1, 2.0));
    CHECK(std::abs(canonical_trace(DiscreteOp::patch_only(p)) - 3.0) < 1e-15);
}

TEST_CASE("weighted trace") {
    CHECK(std::abs(weighted_trace(DiscreteOp::identity(), Weight::abs_D())) < 1e-13);
    CHECK(std::abs(weighted_trace(pw(-1.0), Weight::abs_D()) - 2 * kGamma) < 1e-12);
    CHECK(std::abs(weighted_trace(pw(-1.0), Weight::abs_D().power(2.0)) - 2 * kGamma) < 1e-12);
}

TEST_CASE("regularized trace from a jet") {
    Weight Q = Weight::abs_D();
    DiscreteOp A = pw(-1.0);
    DiscreteOp Ap = compose(A, log_weight_op(Q)) * cplx(-1.0);
    CHECK(std::abs(regularized_trace_from_jet(A, Ap, -1.0) - 2 * kGamma) < 1e-12);
    // vanishing residue density: jet independent
    DiscreteOp B = pw(-2.0);
    CHECK(std::abs(regularized_trace_from_jet(B, pw(-3.0), 0.7) - canonical_trace(B)) < 1e-14);
    DiscreteOp C = pw(-0.5);
    CHECK(std::abs(regularized_trace_from_jet(C, compose(C, log_weight_op(Q)), 2.0) - canonical_trace(C)) < 1e-14);
}

TEST_CASE("conditioned trace") {
    CHECK(std::abs(conditioned_trace(pw(-2.0)) - M_PI * M_PI / 3) < 1e-12);
    Mat T(2, 2);
    T << 1.0, 2.0, 0.5, -1.0;
    DiscreteOp A(PhgSymbol::term(0.0, MatrixTrigPoly::constant(T), MatrixTrigPoly::constant(T)));
    CHECK(std::abs(conditioned_trace(A)) < 1e-15);
    CHECK_THROWS_AS(conditioned_trace(pw(-1.0)), std::domain_error);
}

TEST_CASE("Hochschild defect") {
    DefectPair z = hochschild_defect(pw(-1.0), pw(1.0), Weight::abs_D());
    CHECK(std::abs(z.lhs) < 1e-14);
    CHECK(std::abs(z.rhs) < 1e-14);
    DiscreteOp A(PhgSymbol::term(1.0, mono(-1, 1.0), mono(-1, 1.0)));
    DiscreteOp B(PhgSymbol::term(0.0, mono(1, 1.0), mono(1, 1.0)));
    DefectPair w = hochschild_defect(A, B, Weight::abs_D());
    CHECK(std::abs(w.lhs - 1.0) < 1e-10);
    CHECK(std::abs(w.rhs - 1.0) < 1e-10);
    th::Rng r(22);
    int nonzero = 0;
    for (int i = 0; i < 8; ++i) {
        DiscreteOp X(th::random_symbol(r, double(i % 2), 1, 2), th::random_patch(r, 1, 2, 2));
        DiscreteOp Y(th::random_symbol(r, 0.0, 1, 2));
        for (const Weight& Q : {Weight::abs_D(), Weight::bracket()}) {
            DefectPair d = hochschild_defect(X, Y, Q);
            CHECK(std::abs(d.lhs - d.rhs) <= 1e-7);
            nonzero += std::abs(d.lhs) > 0.05;
        }
    }
    CHECK(nonzero >= 5);
}

TEST_CASE("weight change defect") {
    th::Rng r(23);
    DiscreteOp A(th::random_symbol(r, 0.0, 1, 2));
    DefectPair same = weight_change_defect(A, Weight::bracket(), Weight::bracket());
    CHECK(std::abs(same.lhs) < 1e-13);
    CHECK(std::abs(same.rhs) < 1e-13);
    DefectPair sq = weight_change_defect(A, Weight::abs_D().power(2.0), Weight::abs_D());
    CHECK(std::abs(sq.lhs) < 1e-12);
    CHECK(std::abs(sq.rhs) < 1e-12);
    DefectPair g = weight_change_defect(pw(-1.0), Weight::abs_D(), Weight::bracket());
    CHECK(std::abs(g.lhs) < 1e-10);
    CHECK(std::abs(g.rhs) < 1e-10);
    CHECK(std::abs(weighted_trace(pw(-1.0), Weight::bracket()) - 2 * kGamma) < 1e-10);
}

TEST_CASE("KV pole data") {
    LaurentData L = kv_pole_check(pw(-1.0), Weight::abs_D());
    CHECK(std::abs(L.residue - 2.0) < 1e-14);
    CHECK(L.pole_order() == 1);
    CHECK(std::abs(kv_pole_check(pw(-2.0), Weight::bracket()).residue) == 0.0);
    LaurentData I = kv_pole_check(DiscreteOp::identity(), Weight::abs_D());
    CHECK(std::abs(I.residue) == 0.0);
    CHECK(std::abs(I.finite_part) < 1e-13);
}

TEST_CASE("property: weight powers, smoothing operators and gauge covariance") {
    th::Rng r(24);
    Patch n(1);
    n.add(1, -1, Mat::Constant(1, 1, 0.6));
    DiscreteOp C = compose(DiscreteOp::multiplication(mono(1, 1.0)), DiscreteOp::identity() + DiscreteOp::patch_only(n));
    for (int i = 0; i < 6; ++i) {
        DiscreteOp A(th::random_symbol(r, double(i % 3) - 1.0, 1, 2), th::random_patch(r, 1, 2, 2));
        Patch p = th::random_patch(r, 1, 5, 6);
        for (const Weight& Q : {Weight::abs_D(), Weight::laplacian(), Weight::bracket()}) {
            cplx base = weighted_trace(A, Q);
            for (double t : {2.0, 3.0, 0.5}) CHECK(std::abs(weighted_trace(A, Q.power(t)) - base) <= 1e-9);
            CHECK(std::abs(weighted_trace(DiscreteOp::patch_only(p), Q) - p.trace()) <= 1e-12);
            CHECK(std::abs(weighted_trace(gauge_conjugate(A, C), Q.conjugated(C)) - base) <= 1e-8);
            CHECK(std::abs(kv_pole_check(A, Q).residue - residue(A) / Q.order()) <= 1e-8);
        }
    }
}
