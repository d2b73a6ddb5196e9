#include <benchmark/benchmark.h>

#include "hyperver/gridworld.hpp"
#include "hyperver/sampler.hpp"
#include "hyperver/smc.hpp"

using namespace hyperver;

static void BM_SamplePath(benchmark::State& state) {
    const unsigned n = static_cast<unsigned>(state.range(0));
    const GridSpec spec = make_layout(n, Layout::Default);
    const Dtmc g = build_grid_dtmc(spec);
    SeededSampler rng(1);
    const StateIndex start = grid_state_index(spec, {0, 0}, 1);
    for (auto _ : state) benchmark::DoNotOptimize(sample_path(g, start, 8, rng));
    state.SetItemsProcessed(state.iterations() * 8);
}
BENCHMARK(BM_SamplePath)->Arg(4)->Arg(10);

static void BM_CollisionAvoidance(benchmark::State& state) {
    const unsigned n = static_cast<unsigned>(state.range(0));
    const GridSpec spec = make_layout(n, Layout::Default);
    const Dtmc g = build_grid_dtmc(spec);
    const Formula psi = build_psi_ca(n, 3, 0.5);
    PathAssignment v;
    v.bind("p1", FinitePath{{grid_state_index(spec, spec.robots[0].start, 1)}});
    v.bind("p2", FinitePath{{grid_state_index(spec, spec.robots[1].start, 2)}});
    SmcConfig cfg;
    std::uint64_t samples = 0;
    for (auto _ : state) {
        ++cfg.seed;
        samples += bayes_smc(g, psi, v, cfg).total_samples;
    }
    state.counters["samples"] = benchmark::Counter(static_cast<double>(samples), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_CollisionAvoidance)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

static void BM_GoalReaching(benchmark::State& state) {
    const GridSpec spec = make_layout(4, Layout::Goal11);
    const Dtmc g = build_grid_dtmc(spec);
    const Formula psi = build_psi_goal(4, 8, 0.5, 0.5, 1);
    const PathAssignment v = materialize_assignment(
        g, variable_horizon(psi),
        {{"p1", grid_state_index(spec, spec.robots[0].start, 1)}, {"p2", grid_state_index(spec, spec.robots[1].start, 2)}},
        0);
    SmcConfig cfg;
    for (auto _ : state) {
        ++cfg.seed;
        benchmark::DoNotOptimize(bayes_smc(g, psi, v, cfg));
    }
}
BENCHMARK(BM_GoalReaching)->Unit(benchmark::kMillisecond);
