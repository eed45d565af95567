#pragma once

#include "circtrace/discrete_op.hpp"

namespace ct::kernels {

// Dense block of A on modes -N..N (row/col index (n+N)*d + i).  Serial reference and OpenMP versions.
Mat assemble_serial(const DiscreteOp& A, int N);
Mat assemble_omp(const DiscreteOp& A, int N);

// Dense product.
Mat matmul_serial(const Mat& A, const Mat& B);
Mat matmul_omp(const Mat& A, const Mat& B);

// sum_n d_n f(n) over a window with fixed-order (deterministic) reduction
cplx weighted_diag_sum_serial(const std::vector<cplx>& d, const std::vector<double>& w);
cplx weighted_diag_sum_omp(const std::vector<cplx>& d, const std::vector<double>& w);

}  // namespace ct::kernels
