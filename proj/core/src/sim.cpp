#include "lcstf/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace lcstf {

std::vector<DriverProfile> default_hv_profiles() {
    return {
        {"compact", 4.5, 0.2},
        {"sedan", 5.0, 0.3},
        {"van", 5.5, 0.4},
        {"truck", 8.0, 0.5},
    };
}

void SimConfig::validate() const {
    road.validate();
    idm.validate();
    mobil.validate();
    if (!(dt > 0.0)) {
        throw std::invalid_argument("sim: dt must be positive");
    }
    if (episode_steps <= 0) {
        throw std::invalid_argument("sim: episode_steps must be positive");
    }
    if (!(agent_fraction >= 0.0 && agent_fraction <= 1.0)) {
        throw std::invalid_argument("sim: agent_fraction must lie in [0, 1]");
    }
    if (!(injection_rate >= 0.0) || injection_probability() > 1.0) {
        throw std::invalid_argument("sim: injection_rate must give a per-step probability in [0, 1]");
    }
    if (!(injection_speed >= 0.0 && injection_speed <= kSpeedCap)) {
        throw std::invalid_argument("sim: injection_speed must lie in [0, v_cap]");
    }
    if (hv_profiles.empty()) {
        throw std::invalid_argument("sim: at least one HV profile is required");
    }
    for (const DriverProfile& p : hv_profiles) {
        if (!(p.body_length > 0.0) || !(p.sigma >= 0.0 && p.sigma <= 1.0)) {
            throw std::invalid_argument("sim: HV profile '" + p.name +
                                        "' needs body_length > 0 and sigma in [0, 1]");
        }
    }
    if (!(v0_min_factor > 0.0 && v0_min_factor <= v0_max_factor)) {
        throw std::invalid_argument("sim: require 0 < v0_min_factor <= v0_max_factor");
    }
    if (!(maneuver_duration >= dt) || !(hv_lane_change_interval > 0.0)) {
        throw std::invalid_argument("sim: maneuver_duration >= dt and hv_lane_change_interval > 0");
    }
    if (!(entry_clearance >= 0.0) || !(surround_range > 0.0) || initial_agents < 0 ||
        !(agent_length > 0.0)) {
        throw std::invalid_argument("sim: bad entry_clearance, surround_range, initial_agents or agent_length");
    }
}

int SimConfig::maneuver_steps() const {
    // Guard against 1.0 / 0.1 = 9.999... style rounding before the ceiling.
    return std::max(1, static_cast<int>(std::ceil(maneuver_duration / dt - 1e-9)));
}

int SimConfig::hv_lane_change_period() const {
    return std::max(1, static_cast<int>(std::lround(hv_lane_change_interval / dt)));
}

const VehicleState* SimState::find(std::int64_t id) const {
    auto it = std::lower_bound(vehicles.begin(), vehicles.end(), id,
                               [](const VehicleState& v, std::int64_t key) { return v.id < key; });
    return (it != vehicles.end() && it->id == id) ? &*it : nullptr;
}

std::vector<std::int64_t> SimState::agent_ids() const {
    std::vector<std::int64_t> ids;
    for (const VehicleState& v : vehicles) {
        if (v.kind.is_agent()) {
            ids.push_back(v.id);
        }
    }
    return ids;
}

bool StepEvents::collided(std::int64_t id) const {
    return std::any_of(collisions.begin(), collisions.end(),
                       [id](const CollisionEvent& c) { return c.follower == id || c.leader == id; });
}

bool StepEvents::exited(std::int64_t id) const {
    return std::find(exits.begin(), exits.end(), id) != exits.end();
}

VehicleState& spawn_vehicle(SimState& state, const SimConfig& config, VehicleKind kind, int lane,
                            double lon_pos) {
    VehicleState v;
    v.id = state.next_id++;
    v.kind = kind;
    v.lon_pos = lon_pos;
    v.lane = lane;
    v.lat_pos = lateral_center(lane, config.road);
    v.lon_speed = config.injection_speed;
    if (kind.is_agent()) {
        v.body_length = config.agent_length;
        v.sigma = 0.0;
        v.desired_speed = config.road.v_max;
    } else {
        const DriverProfile& profile = config.hv_profiles.at(static_cast<std::size_t>(kind.profile()));
        v.body_length = profile.body_length;
        v.sigma = profile.sigma;
        v.desired_speed =
            state.rng.uniform(config.v0_min_factor, config.v0_max_factor) * config.road.v_max;
    }
    state.vehicles.push_back(v);
    ++state.counters.injected;
    return state.vehicles.back();
}

SimState reset(const SimConfig& config, std::uint64_t seed) {
    config.validate();
    SimState state;
    state.rng = Rng(seed);
    const int lanes = config.road.lane_count;
    for (int k = 0; k < config.initial_agents; ++k) {
        const int lane = (lanes / 2 + k) % lanes;
        // Staggered so that initial agents never overlap.
        const double pos = config.entry_clearance + 30.0 * static_cast<double>(k / lanes);
        spawn_vehicle(state, config, VehicleKind::agent(), lane, pos);
    }
    return state;
}

namespace {

bool entry_clear(const SimState& state, const SimConfig& config, int lane) {
    for (const VehicleState& v : state.vehicles) {
        if (v.rear_pos() < config.entry_clearance &&
            occupied_lanes(v, config.road).contains(lane)) {
            return false;
        }
    }
    return true;
}

}  // namespace

void inject_vehicles(SimState& state, const SimConfig& config, StepEvents* events) {
    if (!state.rng.bernoulli(config.injection_probability())) {
        return;
    }
    std::vector<int> clear;
    for (int lane = 0; lane < config.road.lane_count; ++lane) {
        if (entry_clear(state, config, lane)) {
            clear.push_back(lane);
        }
    }
    if (clear.empty()) {
        ++state.counters.spawn_skips;
        if (events != nullptr) {
            events->spawn_skipped = true;
        }
        return;
    }
    const int lane = clear[state.rng.uniform_index(clear.size())];
    const bool agent = state.rng.bernoulli(config.agent_fraction);
    const VehicleKind kind =
        agent ? VehicleKind::agent()
              : VehicleKind::human(static_cast<int>(state.rng.uniform_index(config.hv_profiles.size())));
    spawn_vehicle(state, config, kind, lane, 0.0);
    if (events != nullptr) {
        events->spawned = true;
    }
}

namespace {

LaneNeighbors lane_neighbors(std::span<const VehicleState> world, const VehicleState& v, int lane,
                             const RoadSegment& road) {
    LaneNeighbors n;
    if (const VehicleState* leader = nearest_leader(world, v, lane, road)) {
        n.leader = Neighbor{longitudinal_gap(v, *leader), leader->lon_speed};
    }
    if (const VehicleState* follower = nearest_follower(world, v, lane, road)) {
        n.follower = Neighbor{longitudinal_gap(*follower, v), follower->lon_speed};
    }
    return n;
}

Maneuver start_maneuver(const VehicleState& v, Direction d, const SimConfig& config) {
    Maneuver m;
    m.direction = d;
    m.origin_lane = v.lane;
    m.target_lane = v.lane + lane_offset(d);
    m.steps_done = 0;
    m.steps_total = config.maneuver_steps();
    return m;
}

void validate_actions(const SimState& state, const ActionMap& actions) {
    for (const auto& [id, action] : actions) {
        const VehicleState* v = state.find(id);
        if (v == nullptr || !v->kind.is_agent()) {
            throw std::invalid_argument("step: action for unknown or dead agent id " +
                                        std::to_string(id));
        }
    }
    for (const VehicleState& v : state.vehicles) {
        if (v.kind.is_agent() && !actions.contains(v.id)) {
            throw std::invalid_argument("step: missing action for live agent id " +
                                        std::to_string(v.id));
        }
    }
}

}  // namespace

StepEvents step(SimState& state, const ActionMap& actions, const SimConfig& config) {
    validate_actions(state, actions);
    const RoadSegment& road = config.road;
    const std::span<const VehicleState> world(state.vehicles);
    const int period = config.hv_lane_change_period();
    StepEvents events;

    // (1)+(2) decisions on the pre-step snapshot; RNG draws happen in id order.
    std::vector<double> accel(world.size(), 0.0);
    std::vector<std::optional<Maneuver>> starts(world.size());
    for (std::size_t i = 0; i < world.size(); ++i) {
        const VehicleState& v = world[i];
        if (!v.kind.is_agent()) {
            IdmParams ip = config.idm;
            ip.v0 = v.desired_speed;
            const VehicleState* leader = nearest_leader_any(world, v, road);
            const double a = leader ? idm_acceleration(v.lon_speed, longitudinal_gap(v, *leader),
                                                       leader->lon_speed, ip)
                                    : idm_acceleration(v.lon_speed, 0.0, std::nullopt, ip);
            accel[i] = apply_imperfection(a, v.sigma, state.rng);
            if (!v.maneuver && (state.time_step + v.id) % period == 0) {
                MobilInput in;
                in.speed = v.lon_speed;
                in.body_length = v.body_length;
                in.current = lane_neighbors(world, v, v.lane, road);
                if (road.has_lane(v.lane + 1)) {
                    in.left = lane_neighbors(world, v, v.lane + 1, road);
                }
                if (road.has_lane(v.lane - 1)) {
                    in.right = lane_neighbors(world, v, v.lane - 1, road);
                }
                if (const auto d = mobil_decide(in, config.mobil, ip)) {
                    starts[i] = start_maneuver(v, *d, config);
                }
            }
        } else {
            const AgentAction action = actions.at(v.id);
            const LaneChangeFlags flags =
                lane_change_flags(world, v, action, road, config.surround_range);
            if (flags.any()) {
                events.invalid_actions.emplace(v.id, flags);
            }
            accel[i] = commanded_accel(action);
            const auto d = lane_change_direction(action);
            if (d && !v.maneuver && road.has_lane(v.lane + lane_offset(*d))) {
                starts[i] = start_maneuver(v, *d, config);
            }
        }
    }

    // (3)+(4) lateral maneuvers then longitudinal kinematics.
    std::vector<VehicleState> next;
    next.reserve(world.size());
    for (std::size_t i = 0; i < world.size(); ++i) {
        VehicleState v = world[i];
        if (starts[i]) {
            v.maneuver = starts[i];
            ++state.counters.lane_changes_started;
            events.maneuvers_started.push_back(v.id);
        }
        if (v.maneuver) {
            Maneuver& m = *v.maneuver;
            ++m.steps_done;
            const double origin = lateral_center(m.origin_lane, road);
            const double target = lateral_center(m.target_lane, road);
            const double p = m.progress();
            v.lat_pos = origin + (target - origin) * p;
            v.lane = p >= 0.5 ? m.target_lane : m.origin_lane;
            v.lat_speed = lane_offset(m.direction) * road.lane_width / config.maneuver_duration;
            if (m.steps_done >= m.steps_total) {
                v.lat_pos = target;
                v.lat_speed = 0.0;
                v.lane = m.target_lane;
                v.maneuver.reset();
                ++state.counters.lane_changes_completed;
                if (v.kind.is_agent()) {
                    ++state.counters.agent_lane_changes_completed;
                }
                events.maneuvers_completed.push_back(v.id);
            }
        }
        next.push_back(advance_kinematics(v, accel[i], config.dt));
    }
    state.vehicles = std::move(next);

    // (5) collisions.
    events.collisions = detect_collisions(state, road, &events.removed);

    // (6) exits.
    auto exit_begin = std::stable_partition(
        state.vehicles.begin(), state.vehicles.end(),
        [&](const VehicleState& v) { return v.lon_pos <= road.total_length; });
    for (auto it = exit_begin; it != state.vehicles.end(); ++it) {
        events.exits.push_back(it->id);
        events.removed.push_back(*it);
    }
    state.counters.exited += static_cast<std::int64_t>(state.vehicles.end() - exit_begin);
    state.vehicles.erase(exit_begin, state.vehicles.end());

    // (7) injection.
    inject_vehicles(state, config, &events);
    ++state.time_step;
    return events;
}

std::vector<CollisionEvent> detect_collisions(SimState& state, const RoadSegment& road,
                                              std::vector<VehicleState>* removed) {
    std::vector<VehicleState>& vs = state.vehicles;
    std::vector<std::size_t> order(vs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return is_ahead(vs[b], vs[a]); });
    double max_length = 0.0;
    for (const VehicleState& v : vs) {
        max_length = std::max(max_length, v.body_length);
    }

    std::vector<LaneRange> lanes(vs.size());
    for (std::size_t i = 0; i < vs.size(); ++i) {
        lanes[i] = occupied_lanes(vs[i], road);
    }

    std::vector<bool> used(vs.size(), false);
    std::vector<CollisionEvent> events;
    for (std::size_t a = 0; a < order.size(); ++a) {
        const std::size_t f = order[a];
        if (used[f]) {
            continue;
        }
        for (std::size_t b = a + 1; b < order.size(); ++b) {
            const std::size_t l = order[b];
            if (vs[l].lon_pos - max_length >= vs[f].lon_pos) {
                break;
            }
            if (used[l] || !lanes[f].overlaps(lanes[l])) {
                continue;
            }
            if (longitudinal_gap(vs[f], vs[l]) < 0.0) {
                used[f] = true;
                used[l] = true;
                events.push_back(CollisionEvent{vs[f].id, vs[l].id, vs[f].lon_pos,
                                                vs[f].maneuver.has_value() || vs[l].maneuver.has_value()});
                break;
            }
        }
    }

    if (!events.empty()) {
        std::vector<VehicleState> kept;
        kept.reserve(vs.size());
        for (std::size_t i = 0; i < vs.size(); ++i) {
            if (used[i]) {
                if (removed != nullptr) {
                    removed->push_back(vs[i]);
                }
            } else {
                kept.push_back(vs[i]);
            }
        }
        vs = std::move(kept);
        state.counters.collision_events += static_cast<std::int64_t>(events.size());
        state.counters.removed_by_collision += static_cast<std::int64_t>(2 * events.size());
    }
    return events;
}

SegmentStats segment_stats(std::span<const VehicleState> vehicles, const RoadSegment& road) {
    SegmentStats s;
    const auto lanes = static_cast<std::size_t>(road.lane_count);
    std::vector<double> speed_sum(lanes, 0.0);
    std::vector<int> counts(lanes, 0);
    double total = 0.0;
    for (const VehicleState& v : vehicles) {
        if (v.lon_pos < road.warmup_length || v.lon_pos > road.total_length) {
            continue;
        }
        total += v.lon_speed;
        ++s.vehicle_count;
        const auto lane = static_cast<std::size_t>(v.lane);
        speed_sum[lane] += v.lon_speed;
        ++counts[lane];
    }
    const double length = road.evaluation_length();
    s.density = s.vehicle_count / length;
    s.mean_speed = s.vehicle_count > 0 ? total / s.vehicle_count : road.v_max;
    s.lane_mean_speed.resize(lanes);
    s.lane_density.resize(lanes);
    for (std::size_t k = 0; k < lanes; ++k) {
        s.lane_density[k] = counts[k] / length;
        s.lane_mean_speed[k] = counts[k] > 0 ? speed_sum[k] / counts[k] : road.v_max;
    }
    return s;
}

}  // namespace lcstf
