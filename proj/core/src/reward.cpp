#include <algorithm>
#include <limits>

#include "lcstf/env.hpp"

namespace lcstf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

constexpr double kInvalidDirectionPenalty = -0.5;
constexpr double kNoLeaderPenalty = -5.0;
constexpr double kFasterLeaderPenalty = -0.5;
constexpr double kSlowerTargetPenalty = -0.5;
constexpr double kCollisionPenalty = -5.0;

// Below-threshold branch of the two distance terms, floored at -1.
double threshold_penalty(double distance, double threshold) {
    if (distance > threshold) {
        return 0.0;
    }
    return std::max(-1.0, (distance - threshold) / threshold);
}

}  // namespace

double efficiency_score(double v, double v_min, double v_max) {
    if (v > v_max) {
        return -(v - v_max) / v_max;
    }
    if (v >= v_min) {
        return (v - v_min) / v_min;
    }
    return -(v_min - v) / v_min;
}

EfficiencyReward efficiency_reward(double v_e, double v_ego, const RoadSegment& road) {
    EfficiencyReward r;
    r.g_e = efficiency_score(v_e, road.v_min, road.v_max);
    r.l_e = efficiency_score(v_ego, road.v_min, road.v_max);
    r.r_e = r.g_e + r.l_e;
    return r;
}

SafetyReward safety_reward(std::span<const VehicleState> world, const VehicleState& agent,
                           bool collided, const RoadSegment& road, const RewardParams& params) {
    SafetyReward s;
    const bool maneuvering = agent.maneuver.has_value();

    s.d_long = kInf;
    if (const VehicleState* leader = nearest_leader_any(world, agent, road)) {
        s.d_long = longitudinal_gap(agent, *leader);
    }
    if (maneuvering || !params.lon_only_during_maneuver) {
        s.l_lon = threshold_penalty(s.d_long, params.t_min_gap);
    }

    s.d_lat = kInf;
    if (maneuvering || !params.lat_only_during_maneuver) {
        // Outside a maneuver the neighbouring lanes stand in for the target lane.
        const int lo = maneuvering ? agent.maneuver->target_lane : std::max(0, agent.lane - 1);
        const int hi = maneuvering ? agent.maneuver->target_lane
                                   : std::min(road.leftmost_lane(), agent.lane + 1);
        for (const VehicleState& other : world) {
            if (other.id == agent.id) {
                continue;
            }
            const LaneRange lanes = occupied_lanes(other, road);
            if (!lanes.overlaps(LaneRange{lo, hi}) || (!maneuvering && lanes.contains(agent.lane) &&
                                                       lanes.size() == 1)) {
                continue;
            }
            s.d_lat = std::min(s.d_lat, bumper_distance(agent, other));
        }
        s.l_lat = threshold_penalty(s.d_lat, params.t_lat);
    }

    s.l_col = collided ? kCollisionPenalty : 0.0;
    s.r_s = s.l_lon + s.l_lat + s.l_col;
    return s;
}

double comfort_reward(double prev_accel, double accel, double dt, const RewardParams& params) {
    const double delta = accel - prev_accel;
    if (params.comfort_literal) {
        return -delta / (params.jerk_max * params.jerk_max);
    }
    const double ratio = delta / (dt * params.jerk_max);
    return -std::min(1.0, ratio * ratio);
}

double utility_reward(const LaneChangeFlags& flags) {
    double r = 0.0;
    if (flags.left_from_leftmost) r += kInvalidDirectionPenalty;
    if (flags.right_from_rightmost) r += kInvalidDirectionPenalty;
    if (flags.no_leader_ahead) r += kNoLeaderPenalty;
    if (flags.current_leader_faster) r += kFasterLeaderPenalty;
    if (flags.target_leader_slower) r += kSlowerTargetPenalty;
    return r;
}

double utility_reward(std::span<const VehicleState> world_before, AgentAction action,
                      const VehicleState& agent_before, const RoadSegment& road, double range) {
    return utility_reward(lane_change_flags(world_before, agent_before, action, road, range));
}

double weighted_total(const RewardWeights& w, double r_e, double r_s, double r_c, double r_u) {
    return w.w1 * r_e + w.w2 * r_s + w.w3 * r_c + w.w4 * r_u;
}

RewardBreakdown reward(const LaneChangeFlags& flags, std::span<const VehicleState> world_after,
                       const VehicleState& agent_after, bool collided,
                       const SegmentStats& stats_after, const RoadSegment& road,
                       const RewardParams& params, double dt) {
    RewardBreakdown r;
    r.efficiency = efficiency_reward(stats_after.mean_speed, agent_after.lon_speed, road);
    r.safety = safety_reward(world_after, agent_after, collided, road, params);
    r.r_c = comfort_reward(agent_after.prev_accel, agent_after.accel, dt, params);
    r.r_u = utility_reward(flags);
    r.weights = params.weights;
    r.total = weighted_total(params.weights, r.efficiency.r_e, r.safety.r_s, r.r_c, r.r_u);
    return r;
}

}  // namespace lcstf
