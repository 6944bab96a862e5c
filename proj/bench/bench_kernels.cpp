// Parallel kernels against their serial references. With one hardware thread
// the pairs should match; the gap shows up once OMP_NUM_THREADS > 1.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "curvnorm/conformal.hpp"
#include "curvnorm/curvature.hpp"
#include "curvnorm/gauss_bonnet.hpp"
#include "curvnorm/identity_suite.hpp"
#include "curvnorm/pinching.hpp"

using namespace curvnorm;

namespace {

void BM_PfaffianParallel(benchmark::State& state) {
    const auto r = random_curvature(static_cast<int>(state.range(0)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(pfaffian_integrand(r));
}

void BM_PfaffianSerial(benchmark::State& state) {
    const auto r = random_curvature(static_cast<int>(state.range(0)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(pfaffian_integrand_serial(r));
}

ViolationSearchOptions search_options(benchmark::State& state) {
    ViolationSearchOptions o;
    o.trials = state.range(0);
    return o;
}

void BM_ViolationSearchParallel(benchmark::State& state) {
    const auto o = search_options(state);
    for (auto _ : state) benchmark::DoNotOptimize(violation_search(o).max_f);
    state.SetItemsProcessed(state.iterations() * o.trials);
}

void BM_ViolationSearchSerial(benchmark::State& state) {
    const auto o = search_options(state);
    for (auto _ : state) benchmark::DoNotOptimize(violation_search_serial(o).max_f);
    state.SetItemsProcessed(state.iterations() * o.trials);
}

void BM_IdentitySuiteParallel(benchmark::State& state) {
    const IdentitySuiteOptions o{static_cast<int>(state.range(0)), 200, 1};
    for (auto _ : state) benchmark::DoNotOptimize(run_identity_suite(o).max_residual());
}

void BM_IdentitySuiteSerial(benchmark::State& state) {
    const IdentitySuiteOptions o{static_cast<int>(state.range(0)), 200, 1};
    for (auto _ : state) benchmark::DoNotOptimize(run_identity_suite_serial(o).max_residual());
}

void BM_ScalarCurvatureGrid(benchmark::State& state) {
    const auto u = bubble_pullback({4, 0.5}, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(scalar_curvature(u).values.data());
}

}  // namespace

BENCHMARK(BM_PfaffianParallel)->Arg(4)->Arg(6);
BENCHMARK(BM_PfaffianSerial)->Arg(4)->Arg(6);
BENCHMARK(BM_ViolationSearchParallel)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ViolationSearchSerial)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IdentitySuiteParallel)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IdentitySuiteSerial)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);
// Serial only; included as a scale reference for the flow step.
BENCHMARK(BM_ScalarCurvatureGrid)->Arg(512)->Arg(4096);

int main(int argc, char** argv) {
    benchmark::Initialize(&argc, argv);
    benchmark::AddCustomContext("omp_max_threads", std::to_string(omp_get_max_threads()));
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
