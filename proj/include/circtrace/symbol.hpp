#pragma once

#include "circtrace/trigpoly.hpp"

#include <string>
#include <vector>

namespace ct {

inline constexpr int kDefaultDepth = 8;
inline constexpr int kMaxLogPower = 2;

// f_+(x)|xi|^{a-j} log^l|xi| on xi > 0 and f_-(x)|xi|^{a-j} log^l|xi| on xi < 0.
struct HomogeneousTerm {
    int j = 0;
    int logpow = 0;
    MatrixTrigPoly plus, minus;
};

// Finite polyhomogeneous expansion sum_{j<depth} sigma_{a-j}, log powers <= 2.
class PhgSymbol {
public:
    PhgSymbol() : PhgSymbol(0.0, kDefaultDepth, 1) {}
    PhgSymbol(double order, int depth, int dim);

    static PhgSymbol identity(int dim = 1, int depth = kDefaultDepth);
    // c |xi|^alpha (x-independent, both half-lines)
    static PhgSymbol power(double alpha, cplx c = 1.0, int dim = 1, int depth = kDefaultDepth);
    // single-term symbol
    static PhgSymbol term(double order, const MatrixTrigPoly& plus, const MatrixTrigPoly& minus, int logpow = 0,
                          int depth = kDefaultDepth);

    double order() const { return order_; }
    int depth() const { return depth_; }
    int dim() const { return dim_; }
    double degree(const HomogeneousTerm& t) const { return order_ - t.j; }
    const std::vector<HomogeneousTerm>& terms() const { return terms_; }

    // accumulate into the (j, logpow) slot
    void add_term(int j, int logpow, const MatrixTrigPoly& plus, const MatrixTrigPoly& minus);
    const HomogeneousTerm* find(int j, int logpow) const;

    bool is_zero(double tol = 0.0) const;
    // highest degree carried by a nonzero term; -inf when zero
    double effective_order(double tol = 0.0) const;
    int bandwidth() const;
    bool x_independent(double tol = 0.0) const;
    int max_logpow() const;

    // k-th x-Fourier coefficient of sigma(x, n) at integer n; zero at n = 0.
    Mat fourier(int k, int n) const;
    // sigma(x, xi), xi != 0
    Mat eval(double x, double xi) const;

    // same class re-expressed with a different nominal order (a' - a must be an integer >= 0)
    PhgSymbol reorder(double new_order) const;
    PhgSymbol truncated(int depth) const;
    // remove exactly-zero (or tol-small) terms
    PhgSymbol pruned(double tol = 0.0) const;

    PhgSymbol operator+(const PhgSymbol& o) const;
    PhgSymbol operator-(const PhgSymbol& o) const;
    PhgSymbol operator*(cplx v) const;
    PhgSymbol operator-() const { return *this * cplx(-1.0); }

    bool operator==(const PhgSymbol& o) const;
    std::string describe() const;

private:
    double order_;
    int depth_;
    int dim_;
    std::vector<HomogeneousTerm> terms_;  // sorted by (j, logpow)
};

// |xi|^alpha log^l |xi| differentiated r times on xi > 0: coefficients p_m of |xi|^{alpha-r} log^m|xi|, m<=l.
std::vector<double> power_log_derivative(double alpha, int logpow, int r);

// sigma1 * sigma2 ~ sum_i (-i)^i/i! d_xi^i sigma1 d_x^i sigma2, truncated to `depth` degrees.
PhgSymbol star_product(const PhgSymbol& s1, const PhgSymbol& s2, int depth);

// p with s*p - 1 and p*s - 1 of degree <= -depth.  The leading coefficient must have a pointwise
// inverse that is again a trigonometric polynomial (det a single Fourier mode) on both half-lines.
PhgSymbol parametrix(const PhgSymbol& s, int depth);

}  // namespace ct
