#include <benchmark/benchmark.h>

#include "prida/conv.hpp"
#include "prida/synthetic.hpp"

namespace {

void run(benchmark::State& state, prida::ConvPath path)
{
    const int n = static_cast<int>(state.range(0));
    const int side = static_cast<int>(state.range(1));
    const prida::Image f = prida::synthetic_scene(n, n, 1);
    const prida::Kernel k = prida::gaussian_kernel(side, side / 4.0);
    for (auto _ : state) {
        auto out = prida::convolve(f, k, prida::BoundaryMode::circular, path);
        benchmark::DoNotOptimize(out.values().data());
    }
}

void BM_ConvolveDirect(benchmark::State& state) { run(state, prida::ConvPath::direct); }
void BM_ConvolveFft(benchmark::State& state) { run(state, prida::ConvPath::fft); }
void BM_ConvolveAuto(benchmark::State& state) { run(state, prida::ConvPath::automatic); }

} // namespace

BENCHMARK(BM_ConvolveDirect)->ArgsProduct({{64, 255}, {3, 9, 27}});
BENCHMARK(BM_ConvolveFft)->ArgsProduct({{64, 255}, {3, 9, 27}});
BENCHMARK(BM_ConvolveAuto)->ArgsProduct({{64, 255}, {3, 9, 27}});
