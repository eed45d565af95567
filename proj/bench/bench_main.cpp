#include "circtrace/geomforms.hpp"
#include "circtrace/kernels.hpp"
#include "circtrace/traces.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace ct;

namespace {

DiscreteOp sample_op(int d, std::uint64_t seed) {
    std::mt19937_64 g(seed);
    std::normal_distribution<double> N(0.0, 1.0);
    MatrixTrigPoly f(d, 3);
    for (int k = -3; k <= 3; ++k) {
        Mat c(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) c(i, j) = cplx(N(g), N(g)) / double(1 + k * k);
        f.set(k, c);
    }
    return compose(DiscreteOp::multiplication(f), DiscreteOp(PhgSymbol::power(1.0, 1.0, d)));
}

void BM_assemble_serial(benchmark::State& st) {
    DiscreteOp A = sample_op(2, 1);
    for (auto _ : st) benchmark::DoNotOptimize(kernels::assemble_serial(A, int(st.range(0))));
}
void BM_assemble_omp(benchmark::State& st) {
    DiscreteOp A = sample_op(2, 1);
    for (auto _ : st) benchmark::DoNotOptimize(kernels::assemble_omp(A, int(st.range(0))));
}
BENCHMARK(BM_assemble_serial)->Arg(128)->Arg(512);
BENCHMARK(BM_assemble_omp)->Arg(128)->Arg(512);

void BM_matmul_serial(benchmark::State& st) {
    Mat A = kernels::assemble_serial(sample_op(2, 2), int(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(kernels::matmul_serial(A, A));
}
void BM_matmul_omp(benchmark::State& st) {
    Mat A = kernels::assemble_serial(sample_op(2, 2), int(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(kernels::matmul_omp(A, A));
}
BENCHMARK(BM_matmul_serial)->Arg(64)->Arg(160);
BENCHMARK(BM_matmul_omp)->Arg(64)->Arg(160);

void BM_diag_sum(benchmark::State& st, bool omp) {
    std::mt19937_64 g(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<cplx> d(size_t(st.range(0)));
    std::vector<double> w(d.size());
    for (size_t i = 0; i < d.size(); ++i) d[i] = cplx(u(g), u(g)), w[i] = u(g);
    for (auto _ : st)
        benchmark::DoNotOptimize(omp ? kernels::weighted_diag_sum_omp(d, w) : kernels::weighted_diag_sum_serial(d, w));
}
BENCHMARK_CAPTURE(BM_diag_sum, serial, false)->Arg(1 << 20);
BENCHMARK_CAPTURE(BM_diag_sum, omp, true)->Arg(1 << 20);

void BM_compose(benchmark::State& st) {
    DiscreteOp A = sample_op(2, 4), B = sample_op(2, 5);
    for (auto _ : st) benchmark::DoNotOptimize(compose(A, B));
}
BENCHMARK(BM_compose);

void BM_weighted_trace(benchmark::State& st) {
    DiscreteOp A = sample_op(2, 6);
    for (auto _ : st) benchmark::DoNotOptimize(weighted_trace(A, Weight::bracket()));
}
BENCHMARK(BM_weighted_trace);

void BM_freed(benchmark::State& st) {
    Loop U, V;
    U.c[0] = TrigPoly(1, {0.3, 0.5, 0.3});
    U.c[1] = TrigPoly::constant(0.4);
    U.c[2] = TrigPoly(1, {cplx(0, 0.2), 0.1, cplx(0, -0.2)});
    V.c[0] = TrigPoly::constant(0.2);
    V.c[1] = TrigPoly(1, {0.5, -0.3, 0.5});
    V.c[2] = TrigPoly::constant(-0.1);
    for (auto _ : st) benchmark::DoNotOptimize(freed_loop_connection(U, V, 0.5, int(st.range(0))));
}
BENCHMARK(BM_freed)->Arg(64)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
