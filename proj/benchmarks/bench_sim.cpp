#include <benchmark/benchmark.h>

#include "lcstf/sim.hpp"

using namespace lcstf;

namespace {

// Warm road: run the default injection long enough to fill the segment.
SimState warm_state(const SimConfig& c, int steps) {
    SimState st = reset(c, 11);
    for (int t = 0; t < steps; ++t) step(st, {}, c);
    return st;
}

void BM_SimStepHvOnly(benchmark::State& state) {
    SimConfig c;
    c.agent_fraction = 0.0;
    const SimState warm = warm_state(c, static_cast<int>(state.range(0)));
    SimState st = warm;
    for (auto _ : state) {
        step(st, {}, c);
        benchmark::DoNotOptimize(st.vehicles.data());
    }
    state.counters["vehicles"] = static_cast<double>(warm.vehicles.size());
}
BENCHMARK(BM_SimStepHvOnly)->Arg(500)->Arg(3000);

void BM_SegmentStats(benchmark::State& state) {
    SimConfig c;
    c.agent_fraction = 0.0;
    const SimState st = warm_state(c, 3000);
    for (auto _ : state) benchmark::DoNotOptimize(segment_stats(st.vehicles, c.road));
}
BENCHMARK(BM_SegmentStats);

}  // namespace
