#pragma once

// Random world generators shared by unit tests and the acceptance binary.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "lcstf/env.hpp"
#include "lcstf/rng.hpp"

namespace fixtures {

using lcstf::Rng;
using lcstf::VehicleState;

inline lcstf::VehicleKind random_kind(Rng& rng) {
    return rng.bernoulli(0.4) ? lcstf::VehicleKind::agent()
                              : lcstf::VehicleKind::human(static_cast<int>(rng.uniform_index(4)));
}

/// Speed biased towards the efficiency breakpoints.
inline double random_speed(Rng& rng, const lcstf::RoadSegment& road) {
    switch (rng.uniform_index(6)) {
        case 0: return road.v_min;
        case 1: return road.v_max;
        case 2: return road.v_min + rng.uniform(-0.5, 0.5);
        case 3: return road.v_max + rng.uniform(-0.5, 0.5);
        default: return rng.uniform(0.0, 49.0);
    }
}

/// One vehicle centred in a lane, or mid-maneuver with a consistent lane field.
inline VehicleState random_vehicle(Rng& rng, const lcstf::RoadSegment& road, std::int64_t id, double lon_pos) {
    VehicleState v;
    v.id = id;
    v.kind = random_kind(rng);
    v.lon_pos = lon_pos;
    v.lon_speed = random_speed(rng, road);
    v.body_length = v.kind.is_agent() ? 5.0 : std::vector<double>{4.5, 5.0, 5.5, 8.0}[v.kind.profile()];
    v.sigma = v.kind.is_agent() ? 0.0 : 0.2 + 0.1 * v.kind.profile();
    v.accel = rng.uniform(-2.6, 2.6);
    v.prev_accel = rng.uniform(-2.6, 2.6);
    v.lane = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(road.lane_count)));
    v.lat_pos = (v.lane + 0.5) * road.lane_width;
    if (rng.bernoulli(0.3)) {
        const bool left = v.lane == 0 || (v.lane < road.lane_count - 1 && rng.bernoulli(0.5));
        lcstf::Maneuver m;
        m.direction = left ? lcstf::Direction::left : lcstf::Direction::right;
        m.origin_lane = v.lane;
        m.target_lane = v.lane + (left ? 1 : -1);
        m.steps_total = 10;
        m.steps_done = 1 + static_cast<int>(rng.uniform_index(9));
        const double origin = (m.origin_lane + 0.5) * road.lane_width;
        const double target = (m.target_lane + 0.5) * road.lane_width;
        v.lat_pos = origin + (target - origin) * m.progress();
        v.lat_speed = (left ? 1.0 : -1.0) * road.lane_width;
        v.lane = m.progress() >= 0.5 ? m.target_lane : m.origin_lane;
        v.maneuver = m;
    }
    return v;
}

/// Cluster of `n` vehicles within `spread` metres around `center`.
inline std::vector<VehicleState> random_world(Rng& rng, const lcstf::RoadSegment& road, int n, double center,
                                              double spread) {
    std::vector<VehicleState> world;
    for (int i = 0; i < n; ++i) {
        const double pos = std::clamp(center + rng.uniform(-spread, spread), 0.0, road.total_length + 20.0);
        world.push_back(random_vehicle(rng, road, i, pos));
    }
    return world;
}

struct RewardFixture {
    lcstf::RoadSegment road;
    lcstf::RewardParams params;
    double dt = 0.1;
    double range = 100.0;
    std::vector<VehicleState> before;
    VehicleState agent_before;
    lcstf::AgentAction action = lcstf::AgentAction::keep;
    std::vector<VehicleState> survivors;
    std::vector<VehicleState> removed;
    VehicleState agent_after;
    bool collided = false;

    /// Survivors followed by vehicles removed in the step.
    std::vector<VehicleState> world_after() const {
        std::vector<VehicleState> w = survivors;
        w.insert(w.end(), removed.begin(), removed.end());
        return w;
    }
};

/// Pre/post-step world pair around one agent. Post-step positions and
/// speeds are redrawn so that gaps land near the safety thresholds often.
inline RewardFixture random_reward_fixture(Rng& rng) {
    RewardFixture f;
    f.params.weights = {rng.uniform(0.1, 2.0), rng.uniform(0.1, 2.0), rng.uniform(0.1, 2.0), rng.uniform(0.1, 2.0)};
    f.params.lon_only_during_maneuver = rng.bernoulli(0.3);
    f.params.comfort_literal = rng.bernoulli(0.2);

    const int n = 1 + static_cast<int>(rng.uniform_index(9));
    const double center = rng.uniform(0.0, f.road.total_length);
    f.before = random_world(rng, f.road, n, center, rng.bernoulli(0.5) ? 40.0 : 160.0);
    const std::size_t me = rng.uniform_index(f.before.size());
    f.before[me].kind = lcstf::VehicleKind::agent();
    f.before[me].sigma = 0.0;
    f.before[me].body_length = 5.0;
    f.agent_before = f.before[me];
    f.action = lcstf::kAllActions[rng.uniform_index(lcstf::kActionCount)];

    // Post-step world: small forward motion, optional lateral progress.
    std::vector<VehicleState> next = f.before;
    for (VehicleState& v : next) {
        v.lon_pos += v.lon_speed * f.dt + rng.uniform(-0.5, 0.5);
        v.lon_speed = std::clamp(v.lon_speed + rng.uniform(-0.26, 0.26), 0.0, 50.0);
        v.prev_accel = v.accel;
        v.accel = rng.uniform(-2.6, 2.6);
    }
    VehicleState& agent = next[me];
    agent.lon_speed = random_speed(rng, f.road);
    if (rng.bernoulli(0.1)) {
        agent.accel = agent.prev_accel;
    }
    if (!agent.maneuver && rng.bernoulli(0.25)) {
        // A maneuver that just started.
        const bool left = agent.lane < f.road.lane_count - 1;
        lcstf::Maneuver m;
        m.direction = left ? lcstf::Direction::left : lcstf::Direction::right;
        m.origin_lane = agent.lane;
        m.target_lane = agent.lane + (left ? 1 : -1);
        m.steps_total = 10;
        m.steps_done = 1;
        agent.lat_pos += (left ? 1.0 : -1.0) * f.road.lane_width * 0.1;
        agent.maneuver = m;
    }
    // Place some others at gaps near the thresholds from the agent.
    for (std::size_t i = 0; i < next.size(); ++i) {
        if (i == me || !rng.bernoulli(0.5)) continue;
        VehicleState& o = next[i];
        const double d = std::vector<double>{0.0,  2.5, 10.0, rng.uniform(-1.0, 3.0), rng.uniform(2.0, 12.0),
                                             -0.5, 5.0}[rng.uniform_index(7)];
        const bool lead = rng.bernoulli(0.6);
        o.lon_pos = lead ? agent.lon_pos + o.body_length + d : agent.lon_pos - agent.body_length - d;
        if (rng.bernoulli(0.5)) {
            o.lane = agent.maneuver ? agent.maneuver->target_lane : agent.lane;
            o.lat_pos = (o.lane + 0.5) * f.road.lane_width;
            o.maneuver.reset();
            o.lat_speed = 0.0;
        }
    }

    f.collided = rng.bernoulli(0.15);
    for (std::size_t i = 0; i < next.size(); ++i) {
        const bool gone = i == me ? f.collided : rng.bernoulli(0.1);
        (gone ? f.removed : f.survivors).push_back(next[i]);
    }
    f.agent_after = next[me];
    return f;
}

}  // namespace fixtures
