#include "circtrace/kernels.hpp"

#include <omp.h>
#include <stdexcept>

namespace ct::kernels {

namespace {

void fill_column(const DiscreteOp& A, int N, int n, Mat& M) {
    const int d = A.dim();
    for (auto& [m, blk] : A.column(n)) {
        if (m < -N || m > N) continue;
        M.block((m + N) * d, (n + N) * d, d, d) = blk;
    }
}

}  // namespace

Mat assemble_serial(const DiscreteOp& A, int N) {
    const int d = A.dim(), size = (2 * N + 1) * d;
    Mat M = Mat::Zero(size, size);
    for (int n = -N; n <= N; ++n) fill_column(A, N, n, M);
    return M;
}

Mat assemble_omp(const DiscreteOp& A, int N) {
    const int d = A.dim(), size = (2 * N + 1) * d;
    Mat M = Mat::Zero(size, size);
    // columns are disjoint
#pragma omp parallel for schedule(dynamic, 8)
    for (int n = -N; n <= N; ++n) fill_column(A, N, n, M);
    return M;
}

Mat matmul_serial(const Mat& A, const Mat& B) {
    if (A.cols() != B.rows()) throw std::invalid_argument("matmul: shape mismatch");
    const Eigen::Index r = A.rows(), c = B.cols(), k = A.cols();
    Mat C = Mat::Zero(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
        for (Eigen::Index l = 0; l < k; ++l) {
            const cplx b = B(l, j);
            if (b == 0.0) continue;
            for (Eigen::Index i = 0; i < r; ++i) C(i, j) += A(i, l) * b;
        }
    return C;
}

Mat matmul_omp(const Mat& A, const Mat& B) {
    if (A.cols() != B.rows()) throw std::invalid_argument("matmul: shape mismatch");
    const Eigen::Index r = A.rows(), c = B.cols(), k = A.cols();
    Mat C = Mat::Zero(r, c);
    // each thread owns whole output columns; inner order matches the serial kernel
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < c; ++j)
        for (Eigen::Index l = 0; l < k; ++l) {
            const cplx b = B(l, j);
            if (b == 0.0) continue;
            for (Eigen::Index i = 0; i < r; ++i) C(i, j) += A(i, l) * b;
        }
    return C;
}

cplx weighted_diag_sum_serial(const std::vector<cplx>& d, const std::vector<double>& w) {
    if (d.size() != w.size()) throw std::invalid_argument("weighted_diag_sum: size mismatch");
    cplx s = 0.0;
    for (size_t i = 0; i < d.size(); ++i) s += d[i] * w[i];
    return s;
}

cplx weighted_diag_sum_omp(const std::vector<cplx>& d, const std::vector<double>& w) {
    if (d.size() != w.size()) throw std::invalid_argument("weighted_diag_sum: size mismatch");
    // per-chunk partials combined in chunk order, so the result does not depend on the schedule
    constexpr size_t kChunk = 256;
    const size_t nchunks = (d.size() + kChunk - 1) / kChunk;
    std::vector<cplx> part(nchunks, 0.0);
#pragma omp parallel for schedule(static)
    for (long c = 0; c < long(nchunks); ++c) {
        cplx s = 0.0;
        for (size_t i = size_t(c) * kChunk; i < std::min(d.size(), size_t(c + 1) * kChunk); ++i) s += d[i] * w[i];
        part[c] = s;
    }
    cplx s = 0.0;
    for (auto& p : part) s += p;
    return s;
}

}  // namespace ct::kernels
