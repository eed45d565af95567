#include "circtrace/kernels.hpp"
#include "circtrace/oracle.hpp"

#include <ostream>
#include <stdexcept>

namespace ct {

ModeMatrix::ModeMatrix(int N, int dim) : N_(N), d_(dim), M_(Mat::Zero((2 * N + 1) * dim, (2 * N + 1) * dim)) {
    if (N < 0) throw std::invalid_argument("ModeMatrix: negative window");
}

ModeMatrix::ModeMatrix(const DiscreteOp& A, int N) : N_(N), d_(A.dim()) {
    if (N < 0) throw std::invalid_argument("ModeMatrix: negative window");
    M_ = kernels::assemble_omp(A, N);
}

Mat ModeMatrix::block(int m, int n) const {
    if (std::abs(m) > N_ || std::abs(n) > N_) throw std::out_of_range("ModeMatrix::block outside window");
    return M_.block((m + N_) * d_, (n + N_) * d_, d_, d_);
}

cplx ModeMatrix::diag_trace(int n) const { return block(n, n).trace(); }

ModeMatrix ModeMatrix::operator*(const ModeMatrix& o) const {
    if (N_ != o.N_ || d_ != o.d_) throw std::invalid_argument("ModeMatrix: window mismatch");
    ModeMatrix r(N_, d_);
    r.M_ = kernels::matmul_omp(M_, o.M_);
    return r;
}

ModeMatrix ModeMatrix::operator+(const ModeMatrix& o) const {
    if (N_ != o.N_ || d_ != o.d_) throw std::invalid_argument("ModeMatrix: window mismatch");
    ModeMatrix r(N_, d_);
    r.M_ = M_ + o.M_;
    return r;
}

ModeMatrix ModeMatrix::operator-(const ModeMatrix& o) const {
    if (N_ != o.N_ || d_ != o.d_) throw std::invalid_argument("ModeMatrix: window mismatch");
    ModeMatrix r(N_, d_);
    r.M_ = M_ - o.M_;
    return r;
}

void ModeMatrix::write_csv(std::ostream& os) const {
    os << "m,n,i,j,re,im\n";
    for (int n = -N_; n <= N_; ++n)
        for (int m = -N_; m <= N_; ++m)
            for (int i = 0; i < d_; ++i)
                for (int j = 0; j < d_; ++j) {
                    cplx v = M_((m + N_) * d_ + i, (n + N_) * d_ + j);
                    if (v != 0.0) os << m << ',' << n << ',' << i << ',' << j << ',' << v.real() << ',' << v.imag() << '\n';
                }
}

}  // namespace ct
