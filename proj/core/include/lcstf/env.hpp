#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "lcstf/actions.hpp"
#include "lcstf/sim.hpp"

namespace lcstf {

/// Scales used to normalize the observation vector.
struct ObservationParams {
    double v_cap = kSpeedCap;
    double density_scale = 0.15;   ///< [veh/m]
    double lat_speed_scale = 5.0;  ///< [m/s]
    double lane_count_scale = 8.0;

    bool operator==(const ObservationParams&) const = default;
};

inline constexpr int kNeighborSlots = 3;
inline constexpr int kEgoFeatures = 5;
inline constexpr int kNeighborFeatures = 6;
inline constexpr int kGlobalFeatures = 7;

/// 5 + 3*6 + 7 + 2*lanes; 40 on the default five-lane road.
constexpr int observation_size(int lane_count) {
    return kEgoFeatures + kNeighborSlots * kNeighborFeatures + kGlobalFeatures + 2 * lane_count;
}

using Observation = std::vector<float>;

struct RewardWeights {
    double w1 = 1.0;  ///< efficiency
    double w2 = 1.0;  ///< safety
    double w3 = 1.0;  ///< comfort
    double w4 = 1.0;  ///< lane-change utility

    bool operator==(const RewardWeights&) const = default;
};

struct RewardParams {
    RewardWeights weights;
    double t_min_gap = 2.5;  ///< longitudinal safety threshold [m]
    double t_lat = 10.0;     ///< lateral safety threshold [m]
    double jerk_max = 52.0;  ///< (2.6 - (-2.6)) / 0.1
    bool comfort_literal = false;
    bool lon_only_during_maneuver = false;
    bool lat_only_during_maneuver = true;

    bool operator==(const RewardParams&) const = default;
};

/// Everything observe() reads besides the vehicles themselves.
struct ObservationContext {
    const RoadSegment* road = nullptr;
    const SegmentStats* stats = nullptr;
    const ObservationParams* params = nullptr;
    const RewardParams* reward = nullptr;
    double dt = 0.1;
    double surround_range = 100.0;
};

/// Neighbor slots: the (up to) three others within range, by |Δlon| then id.
std::vector<const VehicleState*> select_neighbors(std::span<const VehicleState> world,
                                                  const VehicleState& ego, double range);

/// Builds the observation of `agent_id`. Throws std::invalid_argument when
/// the id is not present in `world`. With `write_counts` non-null, every
/// slot's write count is reported (each must be exactly 1).
Observation observe(std::span<const VehicleState> world, std::int64_t agent_id,
                    const ObservationContext& ctx, std::vector<int>* write_counts = nullptr);

/// Convenience overload computing the segment statistics from `state`.
Observation observe(const SimState& state, std::int64_t agent_id, const SimConfig& config,
                    const ObservationParams& params, const RewardParams& reward);

struct EfficiencyReward {
    double g_e = 0.0;
    double l_e = 0.0;
    double r_e = 0.0;
};

/// Three-branch efficiency score of a speed against [v_min, v_max].
double efficiency_score(double v, double v_min, double v_max);

EfficiencyReward efficiency_reward(double v_e, double v_ego, const RoadSegment& road);

struct SafetyReward {
    double d_long = 0.0;  ///< +inf when no leader
    double d_lat = 0.0;   ///< +inf when not evaluated or nobody in the target lane
    double l_lon = 0.0;
    double l_lat = 0.0;
    double l_col = 0.0;
    double r_s = 0.0;
};

/// Safety terms for `agent` (its post-step record) against `world`, which
/// must include vehicles removed during the step.
SafetyReward safety_reward(std::span<const VehicleState> world, const VehicleState& agent,
                           bool collided, const RoadSegment& road, const RewardParams& params);

double comfort_reward(double prev_accel, double accel, double dt, const RewardParams& params);

double utility_reward(const LaneChangeFlags& flags);

/// Utility from the pre-step world; evaluates the five cases directly.
double utility_reward(std::span<const VehicleState> world_before, AgentAction action,
                      const VehicleState& agent_before, const RoadSegment& road, double range);

struct RewardBreakdown {
    EfficiencyReward efficiency;
    SafetyReward safety;
    double r_c = 0.0;
    double r_u = 0.0;
    RewardWeights weights;
    double total = 0.0;

    double r_e() const { return efficiency.r_e; }
    double r_s() const { return safety.r_s; }
};

double weighted_total(const RewardWeights& w, double r_e, double r_s, double r_c, double r_u);

/// Assembles the four sub-rewards. `world_after` includes vehicles removed
/// this step; `stats_after` comes from the surviving vehicles.
RewardBreakdown reward(const LaneChangeFlags& flags, std::span<const VehicleState> world_after,
                       const VehicleState& agent_after, bool collided,
                       const SegmentStats& stats_after, const RoadSegment& road,
                       const RewardParams& params, double dt);

/// Per-agent outcome of one environment step.
struct AgentStep {
    std::int64_t id = 0;
    Observation observation;  ///< before the step
    AgentAction action = AgentAction::keep;
    RewardBreakdown reward;
    Observation next_observation;
    bool terminal = false;  ///< collided or left the segment
    bool collided = false;
    double speed_after = 0.0;
};

struct EnvStep {
    std::vector<AgentStep> agents;  ///< id order
    StepEvents events;
    SegmentStats stats;  ///< after the step
};

/// decPOMDP view over the simulator: observations, action application, rewards.
class TrafficEnv {
public:
    TrafficEnv(SimConfig sim, ObservationParams obs, RewardParams reward);

    void reset(std::uint64_t seed);

    const SimState& state() const { return state_; }
    const SimConfig& sim_config() const { return sim_; }
    const SegmentStats& stats() const { return stats_; }
    int observation_size() const { return lcstf::observation_size(sim_.road.lane_count); }

    std::vector<std::int64_t> agent_ids() const { return state_.agent_ids(); }

    /// Current observation of every live agent, in id order.
    const std::map<std::int64_t, Observation>& observations() const { return observations_; }

    EnvStep step(const ActionMap& actions);

private:
    ObservationContext context(const SegmentStats& stats) const;
    void refresh_observations();

    SimConfig sim_;
    ObservationParams obs_;
    RewardParams reward_;
    SimState state_;
    SegmentStats stats_;
    std::map<std::int64_t, Observation> observations_;
};

}  // namespace lcstf
