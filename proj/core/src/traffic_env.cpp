#include <utility>

#include "lcstf/env.hpp"

namespace lcstf {

TrafficEnv::TrafficEnv(SimConfig sim, ObservationParams obs, RewardParams reward)
    : sim_(std::move(sim)), obs_(obs), reward_(reward) {
    sim_.validate();
    reset(sim_.seed);
}

ObservationContext TrafficEnv::context(const SegmentStats& stats) const {
    return ObservationContext{&sim_.road, &stats, &obs_, &reward_, sim_.dt, sim_.surround_range};
}

void TrafficEnv::refresh_observations() {
    observations_.clear();
    const ObservationContext ctx = context(stats_);
    for (const VehicleState& v : state_.vehicles) {
        if (v.kind.is_agent()) {
            observations_.emplace(v.id, observe(state_.vehicles, v.id, ctx));
        }
    }
}

void TrafficEnv::reset(std::uint64_t seed) {
    state_ = lcstf::reset(sim_, seed);
    stats_ = segment_stats(state_.vehicles, sim_.road);
    refresh_observations();
}

EnvStep TrafficEnv::step(const ActionMap& actions) {
    EnvStep out;
    out.events = lcstf::step(state_, actions, sim_);
    stats_ = segment_stats(state_.vehicles, sim_.road);
    out.stats = stats_;

    std::vector<VehicleState> world_after = state_.vehicles;
    world_after.insert(world_after.end(), out.events.removed.begin(), out.events.removed.end());
    const ObservationContext ctx = context(stats_);

    std::map<std::int64_t, Observation> next;
    out.agents.reserve(actions.size());
    for (const auto& [id, action] : actions) {
        AgentStep a;
        a.id = id;
        a.action = action;
        a.observation = std::move(observations_.at(id));

        const VehicleState* after = state_.find(id);
        const bool removed = after == nullptr;
        if (removed) {
            for (const VehicleState& r : out.events.removed) {
                if (r.id == id) {
                    after = &r;
                    break;
                }
            }
        }
        a.collided = out.events.collided(id);
        a.terminal = removed;
        a.speed_after = after->lon_speed;

        LaneChangeFlags flags;
        if (auto it = out.events.invalid_actions.find(id); it != out.events.invalid_actions.end()) {
            flags = it->second;
        }
        a.reward = reward(flags, world_after, *after, a.collided, stats_, sim_.road, reward_, sim_.dt);
        a.next_observation = removed ? observe(world_after, id, ctx) : observe(state_.vehicles, id, ctx);
        if (!removed) {
            next.emplace(id, a.next_observation);
        }
        out.agents.push_back(std::move(a));
    }

    // Newly injected agents get their first observation here.
    for (const VehicleState& v : state_.vehicles) {
        if (v.kind.is_agent() && !next.contains(v.id)) {
            next.emplace(v.id, observe(state_.vehicles, v.id, ctx));
        }
    }
    observations_ = std::move(next);
    return out;
}

}  // namespace lcstf
