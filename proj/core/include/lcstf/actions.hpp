#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>

#include "lcstf/road.hpp"

namespace lcstf {

/// Discrete agent action. The underlying value is the Q-network output index.
enum class AgentAction : int { left = 0, right = 1, keep = 2, accelerate = 3, decelerate = 4 };

inline constexpr int kActionCount = 5;

inline constexpr std::array<AgentAction, kActionCount> kAllActions = {
    AgentAction::left, AgentAction::right, AgentAction::keep, AgentAction::accelerate,
    AgentAction::decelerate};

constexpr int action_index(AgentAction a) { return static_cast<int>(a); }

/// Throws std::out_of_range outside [0, kActionCount).
AgentAction action_from_index(int index);

std::string_view to_string(AgentAction a);

constexpr std::optional<Direction> lane_change_direction(AgentAction a) {
    switch (a) {
        case AgentAction::left: return Direction::left;
        case AgentAction::right: return Direction::right;
        default: return std::nullopt;
    }
}

/// Longitudinal command of an action: full authority for accelerate and
/// decelerate, zero otherwise (lane-change actions hold speed).
constexpr double commanded_accel(AgentAction a) {
    switch (a) {
        case AgentAction::accelerate: return kAccelBound;
        case AgentAction::decelerate: return -kAccelBound;
        default: return 0.0;
    }
}

/// The five invalid lane-change cases. All false for non-lane-change
/// actions and for commands issued while a maneuver is already running.
struct LaneChangeFlags {
    bool left_from_leftmost = false;
    bool right_from_rightmost = false;
    bool no_leader_ahead = false;        ///< no leader within range in the current lane
    bool current_leader_faster = false;
    bool target_leader_slower = false;   ///< leader within range in the target lane

    bool any() const {
        return left_from_leftmost || right_from_rightmost || no_leader_ahead ||
               current_leader_faster || target_leader_slower;
    }
    bool operator==(const LaneChangeFlags&) const = default;
};

/// Evaluates the invalid-lane-change cases on the pre-step world.
/// `range` bounds how far ahead (front-to-front) a leader counts.
LaneChangeFlags lane_change_flags(std::span<const VehicleState> world, const VehicleState& agent,
                                  AgentAction action, const RoadSegment& road, double range);

}  // namespace lcstf
