// Serial reference against the OpenMP path for the sampling and training
// kernels. Argument 0 is serial, 1 is parallel.

#include <benchmark/benchmark.h>

#include "qfs/data.hpp"
#include "qfs/diagnostics.hpp"
#include "qfs/parallel.hpp"
#include "qfs/qconv.hpp"
#include "qfs/spectra.hpp"

namespace {

using namespace qfs;

Exec ModeOf(const benchmark::State &state) {
    return state.range(0) == 0 ? Exec::Serial : Exec::Parallel;
}

ModelDescriptor Super(int layers) {
    ModelDescriptor d;
    d.ansatz.family = AnsatzFamily::StronglyEntangling;
    d.architecture = Architecture::SuperParallel;
    d.layers = layers;
    return d;
}

void BM_SampleSpectrum(benchmark::State &state) {
    SpectrumOptions o;
    o.n_samples = 16;
    o.grid_size = 32;
    const auto d = Super(3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_spectrum(d, o, ModeOf(state)).degree);
    }
}
BENCHMARK(BM_SampleSpectrum)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Fidelities(benchmark::State &state) {
    DiagnosticsOptions o;
    o.n_pairs = 2000;
    const auto d = Super(3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_fidelities(d, o, ModeOf(state)).data());
    }
}
BENCHMARK(BM_Fidelities)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_GradientVariance(benchmark::State &state) {
    DiagnosticsOptions o;
    o.n_samples = 200;
    const auto d = Super(4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gradient_variance(d, o, ModeOf(state)).variance);
    }
}
BENCHMARK(BM_GradientVariance)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_TrainEpoch(benchmark::State &state) {
    MackeyGlassParams p;
    p.n_points = 1024;
    const auto data = make_windows(gen_mackey_glass(p).values, mackey_glass_windows());
    ConvConfig conv;
    conv.window = 4;
    conv.descriptor = Super(2);
    QConvModel m(conv, fit_scaler(data));
    m.initialize(0);
    TrainConfig tc;
    tc.epochs = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(train(m, data, tc, ModeOf(state)).best_epoch);
    }
}
BENCHMARK(BM_TrainEpoch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
