#include <benchmark/benchmark.h>

#include "lcstf/env.hpp"

using namespace lcstf;

namespace {

struct Warm {
    SimConfig config;
    SimState state;
    SegmentStats stats;
    std::vector<std::int64_t> agents;

    Warm() {
        config.agent_fraction = 0.5;
        state = reset(config, 5);
        for (int t = 0; t < 2000; ++t) {
            ActionMap a;
            for (auto id : state.agent_ids()) a.emplace(id, AgentAction::keep);
            step(state, a, config);
        }
        stats = segment_stats(state.vehicles, config.road);
        agents = state.agent_ids();
    }
};

void BM_Observe(benchmark::State& state) {
    const Warm w;
    const ObservationParams p;
    const RewardParams r;
    const ObservationContext ctx{&w.config.road, &w.stats, &p, &r, w.config.dt, w.config.surround_range};
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(observe(w.state.vehicles, w.agents[i++ % w.agents.size()], ctx));
    }
}
BENCHMARK(BM_Observe);

void BM_Reward(benchmark::State& state) {
    const Warm w;
    const RewardParams r;
    std::size_t i = 0;
    for (auto _ : state) {
        const VehicleState& agent = *w.state.find(w.agents[i++ % w.agents.size()]);
        const LaneChangeFlags flags =
            lane_change_flags(w.state.vehicles, agent, AgentAction::left, w.config.road, w.config.surround_range);
        benchmark::DoNotOptimize(
            reward(flags, w.state.vehicles, agent, false, w.stats, w.config.road, r, w.config.dt));
    }
}
BENCHMARK(BM_Reward);

void BM_EnvStep(benchmark::State& state) {
    SimConfig c;
    c.agent_fraction = 0.5;
    TrafficEnv env(c, ObservationParams{}, RewardParams{});
    for (int t = 0; t < 1500; ++t) {
        ActionMap a;
        for (const auto& [id, obs] : env.observations()) a.emplace(id, AgentAction::keep);
        env.step(a);
    }
    for (auto _ : state) {
        ActionMap a;
        for (const auto& [id, obs] : env.observations()) a.emplace(id, AgentAction::keep);
        benchmark::DoNotOptimize(env.step(a));
    }
}
BENCHMARK(BM_EnvStep);

}  // namespace
