#include <benchmark/benchmark.h>

#include "structpop/pde.hpp"
#include "structpop/renewal.hpp"
#include "structpop/spectral.hpp"
#include "structpop/transport.hpp"

using namespace structpop;

namespace {

VitalRates bench_model() {
    VitalRates rates;
    rates.name = "bench";
    rates.beta = [](double s, double y) { return 1.5 + s * y; };
    rates.mu = [](double s) { return 0.2 + 0.1 * s; };
    rates.gamma = [](double s) { return 1.0 + 0.3 * s; };
    rates.gamma_min = 1.0;
    return rates;
}

void BM_BuildKernel(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    VitalRates rates = bench_model();
    FlowCache cache(rates);
    Grid grid = make_grid(n);
    for (auto _ : state)
        benchmark::DoNotOptimize(build_L_lambda(rates, cache, grid, 0.5));
    state.SetComplexityN(n);
}
BENCHMARK(BM_BuildKernel)->Arg(100)->Arg(200)->Arg(400)->Arg(800)->Complexity();

void BM_SpectralRadius(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    VitalRates rates = bench_model();
    FlowCache cache(rates);
    Grid grid = make_grid(n);
    KernelMatrix kernel = build_L_lambda(rates, cache, grid, 0.0);
    for (auto _ : state) benchmark::DoNotOptimize(spectral_radius(kernel, grid));
}
BENCHMARK(BM_SpectralRadius)->Arg(200)->Arg(400);

void BM_UpwindStep(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    VitalRates rates = bench_model();
    Grid grid = make_grid(n);
    Density p0 = sample_density(grid, [](double s) { return s * (1 - s); });
    // one recorded interval == one CFL-limited batch of steps
    for (auto _ : state) {
        UpwindOptions options;
        options.record_times = {0.0, 0.1};
        benchmark::DoNotOptimize(solve_pde_upwind(rates, grid, p0, 0.1, options));
    }
}
BENCHMARK(BM_UpwindStep)->Arg(200)->Arg(400);

void BM_RenewalSolve(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    VitalRates rates = bench_model();
    FlowCache cache(rates);
    Grid grid = make_grid(n);
    AgeKernelSet kernels = build_age_kernels(rates, cache, grid, n);
    BirthHistory phi = sample_history(grid, n, cache.Gamma(),
                                      [](double, double) { return 1.0; });
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_renewal(kernels, grid, phi, cache.Gamma()));
}
BENCHMARK(BM_RenewalSolve)->Arg(100)->Arg(200);

void BM_ApplyK(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    VitalRates rates = bench_model();
    FlowCache cache(rates);
    Grid grid = make_grid(n);
    BirthHistory phi = sample_history(grid, n, cache.Gamma(), [](double s, double t) {
        return (1 + t) * s * (1 - s);
    });
    for (auto _ : state) benchmark::DoNotOptimize(apply_K(cache, grid, phi));
}
BENCHMARK(BM_ApplyK)->Arg(200)->Arg(400);

}  // namespace

BENCHMARK_MAIN();
