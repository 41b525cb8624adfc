#include <benchmark/benchmark.h>

#include "perma/model.hpp"
#include "perma/moments.hpp"
#include "perma/sampler.hpp"

namespace {

using namespace perma;

void BM_alpha_permanent(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    Substream rng({42, 0}, 0);
    SquareMatrix M(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) M(i, j) = rng.uniform();
    for (auto _ : state) {
        benchmark::DoNotOptimize(alpha_permanent(M, 0.5));
    }
    state.SetComplexityN(m);
}
BENCHMARK(BM_alpha_permanent)->DenseRange(5, 9)->Unit(benchmark::kMicrosecond);

void BM_determinant(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const SquareMatrix A = random_m_matrix(n, 0.6, {7, 0});
    for (auto _ : state) {
        benchmark::DoNotOptimize(determinant(A));
    }
}
BENCHMARK(BM_determinant)->Arg(4)->Arg(8)->Arg(12);

void BM_spectral_radius(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto d = decompose(random_m_matrix(n, 0.7, {7, 1}));
    for (auto _ : state) {
        benchmark::DoNotOptimize(spectral_radius(d.Bbar));
    }
}
BENCHMARK(BM_spectral_radius)->Arg(4)->Arg(8)->Arg(12);

void BM_z_pmf_table(benchmark::State& state) {
    const double rho = static_cast<double>(state.range(0)) / 10.0;
    const auto model = build_model(random_m_matrix(4, rho, {7, 2}), 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(z_pmf_table(model, 1e-8));
    }
    state.SetLabel("rho=0." + std::to_string(state.range(0)));
}
BENCHMARK(BM_z_pmf_table)->Arg(3)->Arg(5)->Arg(7)->Unit(benchmark::kMillisecond);

void BM_sample_x(benchmark::State& state) {
    const auto model = build_model(SquareMatrix{{2, -1}, {-1, 2}}, 1.0);
    const auto table = z_pmf_table(model, 1e-9);
    Substream rng({7, 3}, 0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_x(model, table, rng));
    }
}
BENCHMARK(BM_sample_x);

void BM_factorial_moment_identity(benchmark::State& state) {
    const auto model = build_model(random_m_matrix(3, 0.5, {7, 4}), 1.0);
    const MultiIndex order{2, 1, 2};
    for (auto _ : state) {
        benchmark::DoNotOptimize(factorial_moment_identity(model, order, 1e-9));
    }
    state.SetLabel("order (2,1,2)");
}
BENCHMARK(BM_factorial_moment_identity)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
