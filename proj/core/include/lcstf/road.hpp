#pragma once

#include <cstdint>
#include <optional>
#include <span>

namespace lcstf {

/// Global longitudinal acceleration bound [m/s^2], applies to every vehicle.
inline constexpr double kAccelBound = 2.6;
/// Physical speed cap [m/s]; independent of the posted limit.
inline constexpr double kSpeedCap = 50.0;
/// Lateral extent of every vehicle [m].
inline constexpr double kVehicleWidth = 1.8;

inline constexpr double kMphToMps = 0.44704;

/// Straight multi-lane segment. Lane 0 is the rightmost lane; lateral
/// offsets are measured from the right road edge.
struct RoadSegment {
    double total_length = 3500.0;
    double warmup_length = 500.0;
    int lane_count = 5;
    double lane_width = 3.2;
    double v_max = 75.0 * kMphToMps;
    double v_min = 45.0 * kMphToMps;

    /// Throws std::invalid_argument on a violated invariant.
    void validate() const;

    double width() const { return lane_width * lane_count; }
    double evaluation_length() const { return total_length - warmup_length; }
    int leftmost_lane() const { return lane_count - 1; }
    bool has_lane(int lane) const { return lane >= 0 && lane < lane_count; }

    bool operator==(const RoadSegment&) const = default;
};

enum class Direction { left, right };

/// Lane offset of a direction: left is +1 (towards higher lane indices).
constexpr int lane_offset(Direction d) { return d == Direction::left ? 1 : -1; }

/// Vehicle kind: an RL agent, or one of the configured human-driver profiles.
class VehicleKind {
public:
    static constexpr VehicleKind agent() { return VehicleKind{-1}; }
    static constexpr VehicleKind human(int profile) { return VehicleKind{profile}; }

    constexpr bool is_agent() const { return profile_ < 0; }
    /// Profile index; only meaningful for human drivers.
    constexpr int profile() const { return profile_; }

    bool operator==(const VehicleKind&) const = default;

private:
    explicit constexpr VehicleKind(int p) : profile_(p) {}
    int profile_;
};

/// Active lateral maneuver. Progress advances in whole steps so that the
/// maneuver lands on the target lane center after exactly `steps_total` steps.
struct Maneuver {
    Direction direction = Direction::left;
    int origin_lane = 0;
    int target_lane = 0;
    int steps_done = 0;
    int steps_total = 1;

    double progress() const { return static_cast<double>(steps_done) / steps_total; }

    bool operator==(const Maneuver&) const = default;
};

struct VehicleState {
    std::int64_t id = 0;
    VehicleKind kind = VehicleKind::agent();
    double lon_pos = 0.0;  ///< front bumper [m] from segment start
    double lat_pos = 0.0;  ///< center [m] from the right road edge
    double lon_speed = 0.0;
    double lat_speed = 0.0;
    double accel = 0.0;       ///< most recently applied
    double prev_accel = 0.0;  ///< applied one step earlier
    int lane = 0;             ///< switches to the target lane at half maneuver
    std::optional<Maneuver> maneuver;
    double body_length = 5.0;
    double sigma = 0.0;
    double desired_speed = 0.0;  ///< IDM v0 for human drivers

    double rear_pos() const { return lon_pos - body_length; }

    bool operator==(const VehicleState&) const = default;
};

/// Contiguous lane interval [lo, hi]; a vehicle never spans more than two lanes.
struct LaneRange {
    int lo = 0;
    int hi = 0;

    bool contains(int lane) const { return lane >= lo && lane <= hi; }
    int size() const { return hi - lo + 1; }
    bool overlaps(const LaneRange& o) const { return lo <= o.hi && o.lo <= hi; }

    bool operator==(const LaneRange&) const = default;
};

/// Lateral center of `lane`. Throws std::out_of_range for a lane outside the road.
double lateral_center(int lane, const RoadSegment& road);

/// Bumper-to-bumper gap; negative when the two bodies overlap.
inline double longitudinal_gap(const VehicleState& follower, const VehicleState& leader) {
    return leader.lon_pos - leader.body_length - follower.lon_pos;
}

/// Signed bumper-to-bumper distance regardless of which vehicle is ahead.
double bumper_distance(const VehicleState& a, const VehicleState& b);

/// One step of point kinematics with a trapezoidal position update.
/// Speed is clamped to [0, kSpeedCap]; the stored acceleration is the one
/// actually realized after clamping.
VehicleState advance_kinematics(const VehicleState& v, double commanded_accel, double dt);

/// Lanes whose lateral band overlaps the vehicle body. While a maneuver is
/// active the vehicle also holds both origin and target lanes until it is
/// within half a body width of the target center.
LaneRange occupied_lanes(const VehicleState& v, const RoadSegment& road);

/// True when `b` is ahead of `a` in the (lon_pos, id) order.
inline bool is_ahead(const VehicleState& b, const VehicleState& a) {
    return b.lon_pos > a.lon_pos || (b.lon_pos == a.lon_pos && b.id > a.id);
}

/// Nearest vehicle ahead of `ego` occupying `lane`, or nullptr.
const VehicleState* nearest_leader(std::span<const VehicleState> world, const VehicleState& ego,
                                   int lane, const RoadSegment& road);

/// Nearest vehicle behind `ego` occupying `lane`, or nullptr.
const VehicleState* nearest_follower(std::span<const VehicleState> world, const VehicleState& ego,
                                     int lane, const RoadSegment& road);

/// Nearest leader over every lane `ego` currently occupies.
const VehicleState* nearest_leader_any(std::span<const VehicleState> world, const VehicleState& ego,
                                       const RoadSegment& road);

}  // namespace lcstf
