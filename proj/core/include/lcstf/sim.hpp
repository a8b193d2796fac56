#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "lcstf/actions.hpp"
#include "lcstf/hv_models.hpp"
#include "lcstf/rng.hpp"
#include "lcstf/road.hpp"

namespace lcstf {

std::vector<DriverProfile> default_hv_profiles();

struct SimConfig {
    RoadSegment road;
    double dt = 0.1;
    double injection_rate = 2160.0;  ///< [veh/h]
    double agent_fraction = 0.2;
    double injection_speed = 45.0 * kMphToMps;
    int episode_steps = 3000;
    std::uint64_t seed = 1;
    std::vector<DriverProfile> hv_profiles = default_hv_profiles();
    double v0_min_factor = 0.9;  ///< HV desired speed ~ U[min, max] * v_max
    double v0_max_factor = 1.0;
    IdmParams idm;
    MobilParams mobil;
    double maneuver_duration = 1.0;
    double hv_lane_change_interval = 1.0;  ///< [s] between MOBIL evaluations per HV
    double entry_clearance = 15.0;         ///< [m] kept clear at the segment start
    double surround_range = 100.0;         ///< [m] neighborhood radius for agents
    int initial_agents = 0;                ///< agents placed at reset, spread over lanes
    double agent_length = 5.0;             ///< [m] AV body length

    void validate() const;
    int maneuver_steps() const;
    int hv_lane_change_period() const;
    double injection_probability() const { return injection_rate * dt / 3600.0; }

    bool operator==(const SimConfig&) const = default;
};

struct SimCounters {
    std::int64_t injected = 0;
    std::int64_t exited = 0;
    std::int64_t removed_by_collision = 0;
    std::int64_t collision_events = 0;
    std::int64_t lane_changes_started = 0;
    std::int64_t lane_changes_completed = 0;
    std::int64_t agent_lane_changes_completed = 0;
    std::int64_t spawn_skips = 0;

    bool operator==(const SimCounters&) const = default;
};

/// Full world state. Vehicles are stored in id (= spawn) order.
struct SimState {
    std::int64_t time_step = 0;
    std::vector<VehicleState> vehicles;
    SimCounters counters;
    Rng rng;
    std::int64_t next_id = 0;

    const VehicleState* find(std::int64_t id) const;
    std::vector<std::int64_t> agent_ids() const;

    bool operator==(const SimState&) const = default;
};

struct CollisionEvent {
    std::int64_t follower = 0;
    std::int64_t leader = 0;
    double lon_pos = 0.0;
    bool during_maneuver = false;  ///< either participant was changing lanes
};

struct StepEvents {
    std::vector<CollisionEvent> collisions;
    std::vector<std::int64_t> exits;
    /// Final records of every vehicle removed this step (collision or exit).
    std::vector<VehicleState> removed;
    std::map<std::int64_t, LaneChangeFlags> invalid_actions;
    std::vector<std::int64_t> maneuvers_started;
    std::vector<std::int64_t> maneuvers_completed;
    bool spawned = false;
    bool spawn_skipped = false;

    bool collided(std::int64_t id) const;
    bool exited(std::int64_t id) const;
};

struct SegmentStats {
    double density = 0.0;     ///< [veh/m] over the evaluation zone
    double mean_speed = 0.0;  ///< v_e [m/s]
    std::vector<double> lane_mean_speed;
    std::vector<double> lane_density;
    int vehicle_count = 0;
};

using ActionMap = std::map<std::int64_t, AgentAction>;

/// Fresh episode state seeded from `seed`.
SimState reset(const SimConfig& config, std::uint64_t seed);

/// Bernoulli injection at the segment start.
void inject_vehicles(SimState& state, const SimConfig& config, StepEvents* events = nullptr);

/// Spawns one vehicle of `kind` at the segment start in `lane`.
VehicleState& spawn_vehicle(SimState& state, const SimConfig& config, VehicleKind kind, int lane,
                            double lon_pos);

/// Advances the world by one dt. Throws std::invalid_argument when
/// `actions` does not cover exactly the live agents.
StepEvents step(SimState& state, const ActionMap& actions, const SimConfig& config);

/// Finds overlapping same-lane pairs, removes both members of each pair,
/// and reports them nearest-first.
std::vector<CollisionEvent> detect_collisions(SimState& state, const RoadSegment& road,
                                              std::vector<VehicleState>* removed = nullptr);

SegmentStats segment_stats(std::span<const VehicleState> vehicles, const RoadSegment& road);

}  // namespace lcstf
