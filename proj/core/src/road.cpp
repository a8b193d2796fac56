#include "lcstf/road.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lcstf {

void RoadSegment::validate() const {
    if (!(total_length > 0.0) || !(warmup_length >= 0.0) || !(warmup_length < total_length)) {
        throw std::invalid_argument("road: require 0 <= warmup_length < total_length");
    }
    if (lane_count < 2) {
        throw std::invalid_argument("road: lane_count must be at least 2");
    }
    if (!(lane_width > kVehicleWidth)) {
        throw std::invalid_argument("road: lane_width must exceed the vehicle width");
    }
    if (!(v_min > 0.0) || !(v_min < v_max)) {
        throw std::invalid_argument("road: require 0 < v_min < v_max");
    }
}

double lateral_center(int lane, const RoadSegment& road) {
    if (!road.has_lane(lane)) {
        throw std::out_of_range("lateral_center: lane " + std::to_string(lane) +
                                " outside [0, " + std::to_string(road.lane_count) + ")");
    }
    return (lane + 0.5) * road.lane_width;
}

double bumper_distance(const VehicleState& a, const VehicleState& b) {
    return is_ahead(b, a) ? longitudinal_gap(a, b) : longitudinal_gap(b, a);
}

VehicleState advance_kinematics(const VehicleState& v, double commanded_accel, double dt) {
    const double a = std::clamp(commanded_accel, -kAccelBound, kAccelBound);
    const double raw = v.lon_speed + a * dt;
    const double speed = std::clamp(raw, 0.0, kSpeedCap);

    VehicleState out = v;
    out.lon_speed = speed;
    out.lon_pos = v.lon_pos + 0.5 * (v.lon_speed + speed) * dt;
    out.prev_accel = v.accel;
    // Realized acceleration; zero when the speed stays pinned at a bound.
    out.accel = (raw == speed)
                    ? a
                    : std::clamp((speed - v.lon_speed) / dt, -kAccelBound, kAccelBound);
    return out;
}

LaneRange occupied_lanes(const VehicleState& v, const RoadSegment& road) {
    const double half = 0.5 * kVehicleWidth;
    const double lo_edge = v.lat_pos - half;
    const double hi_edge = v.lat_pos + half;
    // Band [k w, (k+1) w) meets [lo_edge, hi_edge] iff lo_edge < (k+1) w and k w <= hi_edge.
    int lo = static_cast<int>(std::floor(lo_edge / road.lane_width));
    int hi = static_cast<int>(std::floor(hi_edge / road.lane_width));
    lo = std::clamp(lo, 0, road.leftmost_lane());
    hi = std::clamp(hi, lo, road.leftmost_lane());

    LaneRange r{lo, hi};
    if (v.maneuver) {
        const Maneuver& m = *v.maneuver;
        const double target_center = lateral_center(m.target_lane, road);
        if (std::abs(v.lat_pos - target_center) >= half) {
            r.lo = std::min({r.lo, m.origin_lane, m.target_lane});
            r.hi = std::max({r.hi, m.origin_lane, m.target_lane});
        }
    }
    return r;
}

const VehicleState* nearest_leader(std::span<const VehicleState> world, const VehicleState& ego,
                                   int lane, const RoadSegment& road) {
    const VehicleState* best = nullptr;
    for (const VehicleState& other : world) {
        if (other.id == ego.id || !is_ahead(other, ego)) {
            continue;
        }
        if (best != nullptr && !is_ahead(*best, other)) {
            continue;
        }
        if (occupied_lanes(other, road).contains(lane)) {
            best = &other;
        }
    }
    return best;
}

const VehicleState* nearest_follower(std::span<const VehicleState> world, const VehicleState& ego,
                                     int lane, const RoadSegment& road) {
    const VehicleState* best = nullptr;
    for (const VehicleState& other : world) {
        if (other.id == ego.id || !is_ahead(ego, other)) {
            continue;
        }
        if (best != nullptr && !is_ahead(other, *best)) {
            continue;
        }
        if (occupied_lanes(other, road).contains(lane)) {
            best = &other;
        }
    }
    return best;
}

const VehicleState* nearest_leader_any(std::span<const VehicleState> world, const VehicleState& ego,
                                       const RoadSegment& road) {
    const LaneRange lanes = occupied_lanes(ego, road);
    const VehicleState* best = nullptr;
    double best_gap = 0.0;
    for (int lane = lanes.lo; lane <= lanes.hi; ++lane) {
        const VehicleState* leader = nearest_leader(world, ego, lane, road);
        if (leader == nullptr) {
            continue;
        }
        const double gap = longitudinal_gap(ego, *leader);
        if (best == nullptr || gap < best_gap) {
            best = leader;
            best_gap = gap;
        }
    }
    return best;
}

}  // namespace lcstf
