#pragma once

// Reward recomputed straight from the written definitions. Uses the library
// only for its plain data types; lane occupancy, leaders, gaps and every
// piecewise branch are re-derived here by brute force.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "lcstf/actions.hpp"
#include "lcstf/env.hpp"

namespace oracle {

struct Reward {
    double g_e = 0, l_e = 0, r_e = 0;
    double d_long = 0, d_lat = 0;
    double l_lon = 0, l_lat = 0, l_col = 0, r_s = 0;
    double r_c = 0, r_u = 0, total = 0;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool in_lane(const lcstf::VehicleState& v, int lane, const lcstf::RoadSegment& road) {
    const double w = road.lane_width;
    const double lo = v.lat_pos - 0.9;
    const double hi = v.lat_pos + 0.9;
    const bool band = lo < (lane + 1) * w && lane * w <= hi;
    if (band) {
        return true;
    }
    if (v.maneuver) {
        const double target_center = (v.maneuver->target_lane + 0.5) * w;
        if (std::abs(v.lat_pos - target_center) >= 0.9) {
            return lane == v.maneuver->origin_lane || lane == v.maneuver->target_lane;
        }
    }
    return false;
}

inline bool ahead_of(const lcstf::VehicleState& b, const lcstf::VehicleState& a) {
    return b.lon_pos > a.lon_pos || (b.lon_pos == a.lon_pos && b.id > a.id);
}

inline const lcstf::VehicleState* leader_in(std::span<const lcstf::VehicleState> world,
                                            const lcstf::VehicleState& ego, int lane,
                                            const lcstf::RoadSegment& road) {
    std::vector<const lcstf::VehicleState*> c;
    for (const auto& o : world) {
        if (o.id != ego.id && ahead_of(o, ego) && in_lane(o, lane, road)) {
            c.push_back(&o);
        }
    }
    if (c.empty()) {
        return nullptr;
    }
    return *std::min_element(c.begin(), c.end(), [](auto* x, auto* y) { return ahead_of(*y, *x); });
}

inline double score(double v, double lo, double hi) {
    return v > hi ? -(v - hi) / hi : (v >= lo ? (v - lo) / lo : -(lo - v) / lo);
}

inline double below(double d, double t) { return d <= t ? std::max(-1.0, (d - t) / t) : 0.0; }

inline double utility(std::span<const lcstf::VehicleState> before, const lcstf::VehicleState& me,
                      lcstf::AgentAction action, const lcstf::RoadSegment& road, double range) {
    using lcstf::AgentAction;
    if ((action != AgentAction::left && action != AgentAction::right) || me.maneuver) {
        return 0.0;
    }
    double r = 0.0;
    const int target = me.lane + (action == AgentAction::left ? 1 : -1);
    if (action == AgentAction::left && me.lane == road.lane_count - 1) r -= 0.5;
    if (action == AgentAction::right && me.lane == 0) r -= 0.5;
    const auto* lead = leader_in(before, me, me.lane, road);
    if (lead == nullptr || lead->lon_pos - me.lon_pos > range) {
        r -= 5.0;
    } else if (lead->lon_speed > me.lon_speed) {
        r -= 0.5;
    }
    if (target >= 0 && target < road.lane_count) {
        const auto* t = leader_in(before, me, target, road);
        if (t != nullptr && t->lon_pos - me.lon_pos <= range && t->lon_speed < me.lon_speed) {
            r -= 0.5;
        }
    }
    return r;
}

/// `after` holds survivors and vehicles removed in the step; `survivors`
/// only the former (the segment mean speed is taken over those).
inline Reward reward(std::span<const lcstf::VehicleState> before, const lcstf::VehicleState& me_before,
                     lcstf::AgentAction action, std::span<const lcstf::VehicleState> after,
                     std::span<const lcstf::VehicleState> survivors, const lcstf::VehicleState& me,
                     bool collided, const lcstf::RoadSegment& road, const lcstf::RewardParams& p,
                     double dt, double range) {
    Reward o;

    double sum = 0.0;
    int n = 0;
    for (const auto& v : survivors) {
        if (v.lon_pos >= road.warmup_length && v.lon_pos <= road.total_length) {
            sum += v.lon_speed;
            ++n;
        }
    }
    const double v_e = n > 0 ? sum / n : road.v_max;
    o.g_e = score(v_e, road.v_min, road.v_max);
    o.l_e = score(me.lon_speed, road.v_min, road.v_max);
    o.r_e = o.g_e + o.l_e;

    o.d_long = kInf;
    for (int lane = 0; lane < road.lane_count; ++lane) {
        if (!in_lane(me, lane, road)) continue;
        if (const auto* l = leader_in(after, me, lane, road)) {
            o.d_long = std::min(o.d_long, l->lon_pos - l->body_length - me.lon_pos);
        }
    }
    const bool maneuvering = me.maneuver.has_value();
    o.l_lon = (p.lon_only_during_maneuver && !maneuvering) ? 0.0 : below(o.d_long, p.t_min_gap);

    o.d_lat = kInf;
    if (maneuvering) {
        for (const auto& v : after) {
            if (v.id == me.id || !in_lane(v, me.maneuver->target_lane, road)) continue;
            const double d = ahead_of(v, me) ? v.lon_pos - v.body_length - me.lon_pos
                                             : me.lon_pos - me.body_length - v.lon_pos;
            o.d_lat = std::min(o.d_lat, d);
        }
        o.l_lat = below(o.d_lat, p.t_lat);
    }
    o.l_col = collided ? -5.0 : 0.0;
    o.r_s = o.l_lon + o.l_lat + o.l_col;

    const double da = me.accel - me.prev_accel;
    if (p.comfort_literal) {
        o.r_c = -da / (p.jerk_max * p.jerk_max);
    } else {
        const double jerk = da / dt;
        o.r_c = -std::min(1.0, jerk * jerk / (p.jerk_max * p.jerk_max));
    }
    o.r_u = utility(before, me_before, action, road, range);
    const auto& w = p.weights;
    o.total = w.w1 * o.r_e + w.w2 * o.r_s + w.w3 * o.r_c + w.w4 * o.r_u;
    return o;
}

}  // namespace oracle
