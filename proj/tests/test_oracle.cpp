#include "circtrace/oracle.hpp"
#include "helpers.hpp"

#include <doctest.h>
#include <sstream>

using namespace ct;
using th::mono;

TEST_CASE("spectral zeta oracle: examples") {
    LaurentData L = spectral_zeta_laurent(DiscreteOp(PhgSymbol::power(-1.0)), Weight::abs_D(), 256);
    CHECK(std::abs(L.residue - 2.0) < 1e-12);
    CHECK(std::abs(L.finite_part - 2 * 0.57721566490153286) < 1e-10);

    th::Rng r(31);
    Patch p = th::random_patch(r, 1, 4, 5);
    LaurentData P = spectral_zeta_laurent(DiscreteOp::patch_only(p), Weight::bracket(), 64);
    CHECK(P.residue == 0.0);
    CHECK(std::abs(P.finite_part - p.trace()) < 1e-13);
    CHECK(P.pole_order() == 0);

    LaurentData E = spectral_zeta_laurent(DiscreteOp(PhgSymbol::term(0.0, mono(1, 1.0), mono(1, 1.0))), Weight::abs_D(), 64);
    CHECK(std::abs(E.residue) == 0.0);
    CHECK(std::abs(E.finite_part) == 0.0);
    CHECK(std::abs(E.linear) == 0.0);
}

TEST_CASE("spectral zeta oracle: window stability and agreement with the symbolic route") {
    th::Rng r(32);
    for (int i = 0; i < 6; ++i) {
        DiscreteOp A(th::random_symbol(r, double(i % 3) - 1.0, 1 + i % 2, 2), th::random_patch(r, 1 + i % 2, 2, 2));
        Weight Q = i % 2 ? Weight::laplacian() : Weight::bracket();
        LaurentData a = spectral_zeta_laurent(A, Q, 256), b = spectral_zeta_laurent(A, Q, 512);
        CHECK(std::abs(a.residue - b.residue) <= 1e-10);
        CHECK(std::abs(a.finite_part - b.finite_part) <= 1e-9);
        CHECK(std::abs(b.finite_part - weighted_trace(A, Q)) <= 1e-9);
        CHECK(std::abs(b.residue - residue(A) / Q.order()) <= 1e-9);
    }
    CHECK_THROWS_AS(spectral_zeta_laurent(DiscreteOp(PhgSymbol::power(1.0)), Weight::abs_D(), 4), std::domain_error);
}

TEST_CASE("brute composition check") {
    DiscreteOp M1(PhgSymbol::power(-1.0)), M2(PhgSymbol::power(2.0));
    CHECK(brute_compose_check(M1, M2, 32) == 0.0);
    CHECK(brute_compose_check(th::hardy_up(), th::hardy_down(), 32) == 0.0);
    th::Rng r(33);
    DiscreteOp A(th::random_symbol(r, 0.0, 1, 3)), B(th::random_symbol(r, 0.0, 1, 3));
    CHECK(brute_compose_check(A, B, 32) <= 1e-9);
}

TEST_CASE("dense sections") {
    th::Rng r(34);
    DiscreteOp A(th::random_symbol(r, 0.0, 2, 2), th::random_patch(r, 2, 3, 3));
    ModeMatrix M(A, 10);
    for (int m = -10; m <= 10; ++m)
        for (int n = -10; n <= 10; ++n) CHECK((M.block(m, n) - A.entry(m, n)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(std::abs(M.diag_trace(3) - A.entry(3, 3).trace()) == 0.0);
    std::ostringstream os;
    M.write_csv(os);
    CHECK(!os.str().empty());
}
