// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "metamorph/adversarial.hpp"
#include "metamorph/forecaster.hpp"
#include "metamorph/forecaster_mrs.hpp"
#include "metamorph/spectral.hpp"
#include "metamorph/variation.hpp"

using namespace metamorph;

namespace {

std::vector<double> wave(std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / 20.0) + 0.01 * static_cast<double>(i);
    }
    return v;
}

TrainConfig small_config() {
    TrainConfig c;
    c.hidden_size = 4;
    c.epochs = 2;
    return c;
}

void BM_ReconstructionFast(benchmark::State& state) {
    const auto v = wave(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(spectral::reconstruction_losses(v));
    }
}

void BM_ReconstructionReference(benchmark::State& state) {
    const auto v = wave(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(spectral::reconstruction_losses_reference(v));
    }
}

void BM_CollectRuns(benchmark::State& state) {
    const auto split = default_split(1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(collect_runs(split.train, split.val, small_config(), 4));
    }
}

void BM_CollectRunsSerial(benchmark::State& state) {
    const auto split = default_split(1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(collect_runs_serial(split.train, split.val, small_config(), 4));
    }
}

struct SearchInputs {
    TrainedModel model;
    std::vector<std::vector<double>> windows;
};

const SearchInputs& search_inputs() {
    static const SearchInputs in = [] {
        const auto split = default_split(1);
        SearchInputs s{train(split.train, small_config()), {}};
        s.windows = fmr::adversarial_windows(s.model, split.val, 16);
        return s;
    }();
    return in;
}

void BM_SearchAll(benchmark::State& state) {
    const auto& in = search_inputs();
    for (auto _ : state) {
        benchmark::DoNotOptimize(adversarial::search_all(in.model.params, in.windows, {}));
    }
}

void BM_SearchAllSerial(benchmark::State& state) {
    const auto& in = search_inputs();
    for (auto _ : state) {
        benchmark::DoNotOptimize(adversarial::search_all_serial(in.model.params, in.windows, {}));
    }
}

}  // namespace

BENCHMARK(BM_ReconstructionFast)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReconstructionReference)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CollectRuns)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CollectRunsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SearchAll)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SearchAllSerial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
