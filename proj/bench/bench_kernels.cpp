// Serial against OpenMP versions of the heavy loops. Results are identical;
// only wall time differs.
#include <benchmark/benchmark.h>

#include <cmath>

#include "qinet/benchmarks.hpp"
#include "qinet/fock.hpp"
#include "qinet/kernels.hpp"
#include "qinet/montecarlo.hpp"
#include "qinet/receivers.hpp"

using namespace qinet;

namespace {

NetworkConfig standard_point() {
    NetworkConfig c = make_config(2, 4, 0.1, 1.0, 0.5, 0.0, 1e4);
    c.theta << 0.1, -0.2;
    return c;
}

void BM_MonteCarlo(benchmark::State& st) {
    const RunSpec spec{standard_point(), {ReceiverKind::CtoD, 1.0, 0.0}, 32, 7};
    const bool parallel = st.range(0);
    for (auto _ : st) benchmark::DoNotOptimize(run(spec, parallel).rwmse);
}

void BM_GainSweep(benchmark::State& st) {
    const NetworkConfig c = make_config(50, 120, 0.5, 32, 0.5, 0.0, 2e4);
    const std::size_t n = 64;
    auto f = [&](std::size_t i) {
        const double g = std::exp(std::log(1.001) + (std::log(500.0) - std::log(1.001)) * double(i) / (n - 1));
        return pa_rwmse(c, {ReceiverKind::sPCR, g}).full;
    };
    const bool parallel = st.range(0);
    for (auto _ : st) {
        auto v = parallel ? kernels::map_parallel(n, f) : kernels::map_serial(n, f);
        benchmark::DoNotOptimize(v.data());
    }
}

void BM_FockThermalLoss(benchmark::State& st) {
    const fock::FockState in = fock::tmsv(0.1, 30);
    const bool parallel = st.range(0);
    for (auto _ : st)
        benchmark::DoNotOptimize(fock::thermal_loss(in, 0, 0.3, 0.0, 0.5, fock::kLeakageBudget, parallel).leakage);
}

void BM_Homodyne(benchmark::State& st) {
    const bool parallel = st.range(0);
    for (auto _ : st) benchmark::DoNotOptimize(homodyne_mse(std::sqrt(112.0), 0.01, parallel));
}

}  // namespace

BENCHMARK(BM_MonteCarlo)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_GainSweep)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FockThermalLoss)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Homodyne)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
