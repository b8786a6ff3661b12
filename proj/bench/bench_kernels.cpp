// Serial reference kernels against their OpenMP versions.

#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>
#include <vector>

#include "hsps/jsa.hpp"
#include "hsps/kernels/jsa_fill.hpp"
#include "hsps/kernels/pulse_train.hpp"

using namespace hsps;

namespace {

struct JsaSetup {
    CrystalSpec spec;
    PumpSpec pump;
    BeamGeometry geom = BeamGeometry::from_focal(0.55, 0.55, 0.55);
    FrequencyGrid grid;

    explicit JsaSetup(std::size_t n)
    {
        spec.model = std::make_shared<const DispersionModel>(ktp_koenig_wong_fradkin());
        grid = default_grid(spec, pump, n, 3.0);
    }
};

template <class Fill>
void run_jsa(benchmark::State& state, Fill fill)
{
    const JsaSetup s(static_cast<std::size_t>(state.range(0)));
    const kernels::JsaFillInput in{s.spec, s.pump, s.geom, s.grid, {}};
    for (auto _ : state) benchmark::DoNotOptimize(fill(in));
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void BM_JsaFillSerial(benchmark::State& state) { run_jsa(state, kernels::jsa_fill_serial); }
void BM_JsaFillOmp(benchmark::State& state) { run_jsa(state, kernels::jsa_fill_omp); }

kernels::PulseTrainInput train(std::uint64_t trials)
{
    // 40 bins, 5 dead at each end plus the final bin
    std::vector<double> survival;
    for (int k : {40, 30, 29, 28, 27, 26, 25, 24, 23, 22, 21, 20, 19, 18, 17, 16, 15, 14, 13, 12, 11, 10, 9, 8, 7, 6}) {
        survival.push_back(std::pow(1.0 - 0.067, 40 - k + 1));
    }
    return {1.84e-3, survival, trials, 20240611};
}

void BM_PulseTrainSerial(benchmark::State& state)
{
    const auto in = train(static_cast<std::uint64_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(kernels::pulse_train_serial(in));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_PulseTrainOmp(benchmark::State& state)
{
    const auto in = train(static_cast<std::uint64_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(kernels::pulse_train_omp(in));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_JsaFillSerial)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_JsaFillOmp)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PulseTrainSerial)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PulseTrainOmp)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
