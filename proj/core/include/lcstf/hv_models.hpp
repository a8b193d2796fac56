#pragma once

#include <optional>
#include <string>

#include "lcstf/rng.hpp"
#include "lcstf/road.hpp"

namespace lcstf {

/// Intelligent Driver Model parameters.
struct IdmParams {
    double v0 = 75.0 * kMphToMps;  ///< desired speed [m/s]
    double time_headway = 1.5;     ///< T [s]
    double a_max = 2.6;            ///< [m/s^2]
    double comfortable_decel = 2.0;///< b [m/s^2]
    double min_gap = 2.5;          ///< s0 [m]
    double delta = 4.0;

    void validate() const;
    bool operator==(const IdmParams&) const = default;
};

struct MobilParams {
    double politeness = 0.2;
    double accel_threshold = 0.1;  ///< [m/s^2]
    double safe_decel = 2.0;       ///< [m/s^2], positive magnitude

    void validate() const;
    bool operator==(const MobilParams&) const = default;
};

/// One human-driver type. The desired speed is drawn per vehicle at spawn.
struct DriverProfile {
    std::string name;
    double body_length = 5.0;
    double sigma = 0.0;

    bool operator==(const DriverProfile&) const = default;
};

/// IDM acceleration clamped to the global bound. Without a leader the
/// interaction term vanishes. A non-positive gap to an existing leader
/// returns the emergency floor -kAccelBound.
double idm_acceleration(double ego_speed, double gap, std::optional<double> leader_speed,
                        const IdmParams& p);

/// Another vehicle seen from the lane-change candidate. `gap` is bumper to
/// bumper: leader rear minus ego front, or ego rear minus follower front.
struct Neighbor {
    double gap = 0.0;
    double speed = 0.0;
};

struct LaneNeighbors {
    std::optional<Neighbor> leader;
    std::optional<Neighbor> follower;
};

struct MobilInput {
    double speed = 0.0;
    double body_length = 5.0;
    LaneNeighbors current;
    std::optional<LaneNeighbors> left;   ///< absent when there is no lane to the left
    std::optional<LaneNeighbors> right;  ///< absent when there is no lane to the right
};

/// Incentive of one candidate lane, or nullopt when the safety criterion fails.
std::optional<double> mobil_incentive(const MobilInput& in, const LaneNeighbors& target,
                                      const MobilParams& mp, const IdmParams& ip);

/// MOBIL lane-change decision. Left wins ties.
std::optional<Direction> mobil_decide(const MobilInput& in, const MobilParams& mp,
                                      const IdmParams& ip);

/// Dawdling with an explicit uniform variate u in [0, 1].
double apply_imperfection(double accel, double sigma, double u);

/// Dawdling: reduces acceleration by sigma * kAccelBound * U[0,1], clamped to the bound.
double apply_imperfection(double accel, double sigma, Rng& rng);

}  // namespace lcstf
