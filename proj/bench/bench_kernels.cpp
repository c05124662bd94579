// Serial reference kernels against the OpenMP kernels.
//   ./bench_kernels --benchmark_filter=Carpet

#include <benchmark/benchmark.h>

#include "qcarpet/bohmian.hpp"
#include "qcarpet/cavity.hpp"
#include "qcarpet/evolution.hpp"
#include "qcarpet/kernels.hpp"
#include "qcarpet/parallel.hpp"

using namespace qcarpet;

namespace {

const CavityConfig kCfg{};
const DecoherenceParams kDamped{DecoherenceParams::default_gamma(), LambdaMode::Formula, 0.0};

const SpectralState& state() {
    static const SpectralState s = decompose({SignalKind::Single, 6.0, 10.0}, kCfg, 50);
    return s;
}

SpaceTimeGrid grid(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    return SpaceTimeGrid::uniform(kCfg, n, n, 8 * revival_times(kCfg).tau);
}

void set_points(benchmark::State& st, std::size_t points) {
    st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * points));
}

void BM_CarpetDensityReference(benchmark::State& st) {
    const auto g = grid(st);
    for (auto _ : st) benchmark::DoNotOptimize(reference::carpet(state(), g, Quantity::Density, kDamped));
    set_points(st, g.x_points.size() * g.t_points.size());
}

void BM_CarpetDensityParallel(benchmark::State& st) {
    const auto g = grid(st);
    ThreadCountScope threads(static_cast<int>(st.range(1)));
    for (auto _ : st) benchmark::DoNotOptimize(carpet(state(), g, Quantity::Density, kDamped));
    set_points(st, g.x_points.size() * g.t_points.size());
}

void BM_CarpetVelocityReference(benchmark::State& st) {
    const auto g = grid(st);
    for (auto _ : st) benchmark::DoNotOptimize(reference::carpet(state(), g, Quantity::Velocity, kDamped));
    set_points(st, g.x_points.size() * g.t_points.size());
}

void BM_CarpetVelocityParallel(benchmark::State& st) {
    const auto g = grid(st);
    ThreadCountScope threads(static_cast<int>(st.range(1)));
    for (auto _ : st) benchmark::DoNotOptimize(carpet(state(), g, Quantity::Velocity, kDamped));
    set_points(st, g.x_points.size() * g.t_points.size());
}

void BM_DensityMatrixReference(benchmark::State& st) {
    const auto xs = linspace(-25.0, 25.0, static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(reference::density_matrix_grid(state(), xs, xs, 400.0, kDamped));
    set_points(st, xs.size() * xs.size());
}

void BM_DensityMatrixParallel(benchmark::State& st) {
    const auto xs = linspace(-25.0, 25.0, static_cast<std::size_t>(st.range(0)));
    ThreadCountScope threads(static_cast<int>(st.range(1)));
    for (auto _ : st) benchmark::DoNotOptimize(density_matrix_grid(state(), xs, xs, 400.0, kDamped));
    set_points(st, xs.size() * xs.size());
}

void BM_Ensemble(benchmark::State& st) {
    const InputSignalSpec sig{SignalKind::Single, 6.0, 10.0};
    const auto seeds = seed_positions({static_cast<int>(st.range(0)), Seeding::Uniform, {}}, sig, state());
    const std::vector<double> times = linspace(0.0, revival_times(kCfg).tau, 41);
    ThreadCountScope threads(static_cast<int>(st.range(1)));
    for (auto _ : st) benchmark::DoNotOptimize(integrate_ensemble(state(), seeds, times, kDamped));
}

void thread_args(benchmark::internal::Benchmark* b, std::initializer_list<std::int64_t> sizes) {
    const int maxt = max_threads();
    for (auto n : sizes)
        for (int t = 1; t <= maxt; t *= 2) b->Args({n, t});
}

} // namespace

BENCHMARK(BM_CarpetDensityReference)->Arg(101)->Arg(201)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CarpetDensityParallel)->Apply([](auto* b) { thread_args(b, {101, 201}); })->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CarpetVelocityReference)->Arg(101)->Arg(201)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CarpetVelocityParallel)->Apply([](auto* b) { thread_args(b, {101, 201}); })->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DensityMatrixReference)->Arg(101)->Arg(201)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DensityMatrixParallel)->Apply([](auto* b) { thread_args(b, {101, 201}); })->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Ensemble)->Apply([](auto* b) { thread_args(b, {8}); })->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
