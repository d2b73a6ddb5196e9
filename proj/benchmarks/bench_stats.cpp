#include <benchmark/benchmark.h>

#include "hyperver/beta.hpp"
#include "hyperver/hypothesis.hpp"

using namespace hyperver;

static void BM_IncompleteBeta(benchmark::State& state) {
    const double a = 1.0 + static_cast<double>(state.range(0));
    double x = 0.01;
    for (auto _ : state) {
        benchmark::DoNotOptimize(regularized_incomplete_beta(x, a, a + 3));
        x = x > 0.98 ? 0.01 : x + 0.0137;
    }
}
BENCHMARK(BM_IncompleteBeta)->Arg(1)->Arg(100)->Arg(100000);

static void BM_BayesFactor(benchmark::State& state) {
    const std::size_t dims = static_cast<std::size_t>(state.range(0));
    const std::uint64_t n = 1024;
    const BoxRegion d(std::vector<Interval>(dims, Interval{0.3, 0.7}));
    const BernoulliCounts counts(std::vector<std::uint64_t>(dims, 500), n);
    for (auto _ : state) benchmark::DoNotOptimize(bayes_factor(BetaPrior(2, 5), counts, d));
}
BENCHMARK(BM_BayesFactor)->Arg(1)->Arg(4)->Arg(16);

static void BM_ApproxTest(benchmark::State& state) {
    const BoxRegion d({{0.3, 1}});
    const BernoulliCounts counts({700}, 1000);
    for (auto _ : state) benchmark::DoNotOptimize(approx_bayes_test(BetaPrior::uniform(), counts, d, 0.05, 0.01, 0.01));
}
BENCHMARK(BM_ApproxTest);
