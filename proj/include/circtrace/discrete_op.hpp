#pragma once

#include "circtrace/symbol.hpp"

#include <map>
#include <utility>
#include <vector>

namespace ct {

// Columns |n| <= kExactWindow of every composition are computed exactly.
inline constexpr int kExactWindow = 96;

// Finitely supported mode matrix (m, n) -> d x d block.
class Patch {
public:
    explicit Patch(int dim = 1) : dim_(dim) {}

    int dim() const { return dim_; }
    bool empty() const { return cols_.empty(); }
    size_t size() const;

    void add(int m, int n, const Mat& v);
    Mat get(int m, int n) const;
    // largest |m| or |n| appearing; -1 when empty
    int support() const;
    // max |m - n|
    int bandwidth() const;
    cplx trace() const;

    // entries of column n (row, block)
    const std::map<int, Mat>* column(int n) const;
    const std::map<int, std::map<int, Mat>>& columns() const { return cols_; }

    Patch operator+(const Patch& o) const;
    Patch operator*(cplx v) const;
    Patch pruned(double tol) const;
    bool operator==(const Patch& o) const;

private:
    int dim_;
    std::map<int, std::map<int, Mat>> cols_;  // n -> m -> block
};

// Op(symbol) + patch acting on Fourier modes of S^1.
class DiscreteOp {
public:
    DiscreteOp() = default;
    explicit DiscreteOp(PhgSymbol sym) : sym_(std::move(sym)), patch_(sym_.dim()) {}
    DiscreteOp(PhgSymbol sym, Patch patch);

    static DiscreteOp identity(int dim = 1, int depth = kDefaultDepth);
    static DiscreteOp zero(int dim = 1, double order = 0.0, int depth = kDefaultDepth);
    static DiscreteOp patch_only(const Patch& p, int depth = kDefaultDepth);
    // true multiplication operator by f(x): Op(f) plus the mode-0 column it misses
    static DiscreteOp multiplication(const MatrixTrigPoly& f, int depth = kDefaultDepth);
    // |xi|^alpha multiplier with value z0 on mode 0 (scalar fibers times identity)
    static DiscreteOp multiplier(const PhgSymbol& s, cplx zero_mode = 0.0);

    const PhgSymbol& symbol() const { return sym_; }
    const Patch& patch() const { return patch_; }
    int dim() const { return sym_.dim(); }
    double order() const { return sym_.order(); }
    int depth() const { return sym_.depth(); }
    // the symbol part neglects degrees <= tail_degree
    double tail_degree() const { return sym_.order() - sym_.depth(); }
    int bandwidth() const;

    Mat entry(int m, int n) const;
    // nonzero entries of column n
    std::vector<std::pair<int, Mat>> column(int n) const;

    DiscreteOp operator+(const DiscreteOp& o) const;
    DiscreteOp operator-(const DiscreteOp& o) const;
    DiscreteOp operator*(cplx v) const;

    bool operator==(const DiscreteOp& o) const;

private:
    PhgSymbol sym_;
    Patch patch_;
};

// A o B: symbol part star_product to `depth`, patch exact on columns |n| <= max(window, supports).
DiscreteOp compose(const DiscreteOp& A, const DiscreteOp& B, int depth = kDefaultDepth, int window = kExactWindow);
DiscreteOp commutator(const DiscreteOp& A, const DiscreteOp& B, int depth = kDefaultDepth,
                      int window = kExactWindow);

// Exact banded inverse when one exists (parametrix symbol plus finite-rank correction).
DiscreteOp exact_inverse(const DiscreteOp& C, int depth = kDefaultDepth);
// C^{-1} A C
DiscreteOp gauge_conjugate(const DiscreteOp& A, const DiscreteOp& C, int depth = kDefaultDepth);
DiscreteOp gauge_conjugate(const DiscreteOp& A, const DiscreteOp& C, const DiscreteOp& Cinv,
                           int depth = kDefaultDepth);

// Upper bound on |(A B)(m,n) - compose(A,B)(m,n)| for the neglected Taylor tail in column n.
double composition_tail_bound(const DiscreteOp& A, const DiscreteOp& B, int depth, int n);

}  // namespace ct
