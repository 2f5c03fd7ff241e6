#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "prida/optimizer.hpp"
#include "prida/simplex.hpp"

namespace {

struct KernelCase {
    std::vector<double> k;
    std::vector<double> g;
};

KernelCase make_case(std::size_t s)
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0.0, 1.0);
    KernelCase c{std::vector<double>(s), std::vector<double>(s)};
    double total = 0.0;
    for (double& v : c.k) {
        v = std::exp(n(rng));
        total += v;
    }
    for (double& v : c.k)
        v /= total;
    for (double& v : c.g)
        v = n(rng);
    return c;
}

constexpr double kLipschitz = 50.0;

void BM_PridaKernelUpdate(benchmark::State& state)
{
    const auto c = make_case(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        const auto eta = prida::adaptive_kernel_steps(c.k, c.g, 0.5, kLipschitz);
        auto next = prida::entropic_step(c.k, c.g, eta, 1000.0);
        benchmark::DoNotOptimize(next.data());
    }
    state.SetComplexityN(state.range(0));
}

void BM_PgdKernelUpdate(benchmark::State& state)
{
    const auto c = make_case(static_cast<std::size_t>(state.range(0)));
    std::vector<double> v(c.k.size());
    for (auto _ : state) {
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] = c.k[i] - c.g[i] / kLipschitz;
        auto next = prida::project_simplex(v);
        benchmark::DoNotOptimize(next.data());
    }
    state.SetComplexityN(state.range(0));
}

} // namespace

BENCHMARK(BM_PridaKernelUpdate)->RangeMultiplier(3)->Range(9, 6561)->Complexity();
BENCHMARK(BM_PgdKernelUpdate)->RangeMultiplier(3)->Range(9, 6561)->Complexity();
