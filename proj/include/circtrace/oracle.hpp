#pragma once

#include "circtrace/traces.hpp"

#include <iosfwd>

namespace ct {

inline constexpr int kMaxDenseWindow = 512;

// Dense section of an operator on modes -N..N.
class ModeMatrix {
public:
    ModeMatrix(int N, int dim);
    ModeMatrix(const DiscreteOp& A, int N);

    int window() const { return N_; }
    int dim() const { return d_; }
    const Mat& matrix() const { return M_; }
    Mat& matrix() { return M_; }

    Mat block(int m, int n) const;
    // fiber trace of the diagonal block at mode n
    cplx diag_trace(int n) const;

    ModeMatrix operator*(const ModeMatrix& o) const;
    ModeMatrix operator+(const ModeMatrix& o) const;
    ModeMatrix operator-(const ModeMatrix& o) const;

    void write_csv(std::ostream& os) const;

private:
    int N_, d_;
    Mat M_;
};

// Laurent data at z = 0 of sum_n tr diag(A Q^{-z})(n): dense window sum plus Hurwitz tail of the symbol.
LaurentData spectral_zeta_laurent(const DiscreteOp& A, const Weight& Q, int N);

// Max entrywise deviation on the safe inner window between dense(A) dense(B) and dense(compose(A, B)),
// net of the truncation tail bound and a roundoff allowance.
double brute_compose_check(const DiscreteOp& A, const DiscreteOp& B, int N, int depth = kDefaultDepth);

}  // namespace ct
