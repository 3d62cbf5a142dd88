#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "ecgemd/denoise.hpp"
#include "ecgemd/emd.hpp"
#include "ecgemd/features.hpp"
#include "ecgemd/tree.hpp"

namespace {

std::vector<double> signal(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.2);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / 128.0;
        x[i] = std::sin(2 * 3.141592653589793 * 1.2 * t) + 0.3 * std::sin(2 * 3.141592653589793 * 9.0 * t) + noise(rng);
    }
    return x;
}

void BM_Denoise(benchmark::State& state) {
    const auto x = signal(static_cast<std::size_t>(state.range(0)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(ecgemd::denoise(x, ecgemd::DenoiseConfig{}));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Denoise)->Arg(1 << 16)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

void BM_EmdDecompose(benchmark::State& state) {
    const auto x = signal(static_cast<std::size_t>(state.range(0)), 2);
    for (auto _ : state) benchmark::DoNotOptimize(ecgemd::emd_decompose(x));
}
BENCHMARK(BM_EmdDecompose)->Arg(5000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_ApproximateEntropy(benchmark::State& state) {
    const auto x = signal(static_cast<std::size_t>(state.range(0)), 3);
    const double r = 0.2 * ecgemd::std_dev(x);
    for (auto _ : state) benchmark::DoNotOptimize(ecgemd::approximate_entropy(x, 2, r));
}
BENCHMARK(BM_ApproximateEntropy)->Arg(1000)->Arg(2000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_FitTree(benchmark::State& state) {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g(0, 1);
    ecgemd::TrainingSet data(45);
    std::vector<double> row(45);
    for (long i = 0; i < state.range(0); ++i) {
        for (auto& v : row) v = g(rng);
        data.add_row(row, row[0] + 0.5 * row[7] + 0.3 * g(rng) > 0 ? ecgemd::ClassLabel::kHpt
                                                                   : ecgemd::ClassLabel::kNormal);
    }
    for (auto _ : state) benchmark::DoNotOptimize(ecgemd::fit_tree(data, ecgemd::TreeConfig{}));
}
BENCHMARK(BM_FitTree)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
