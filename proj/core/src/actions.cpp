#include "lcstf/actions.hpp"

#include <stdexcept>
#include <string>

namespace lcstf {

AgentAction action_from_index(int index) {
    if (index < 0 || index >= kActionCount) {
        throw std::out_of_range("action index " + std::to_string(index) + " outside [0, 5)");
    }
    return static_cast<AgentAction>(index);
}

std::string_view to_string(AgentAction a) {
    switch (a) {
        case AgentAction::left: return "left";
        case AgentAction::right: return "right";
        case AgentAction::keep: return "keep";
        case AgentAction::accelerate: return "accelerate";
        case AgentAction::decelerate: return "decelerate";
    }
    return "?";
}

LaneChangeFlags lane_change_flags(std::span<const VehicleState> world, const VehicleState& agent,
                                  AgentAction action, const RoadSegment& road, double range) {
    LaneChangeFlags flags;
    const auto direction = lane_change_direction(action);
    if (!direction || agent.maneuver) {
        return flags;
    }
    const int target = agent.lane + lane_offset(*direction);
    flags.left_from_leftmost = *direction == Direction::left && agent.lane == road.leftmost_lane();
    flags.right_from_rightmost = *direction == Direction::right && agent.lane == 0;

    const VehicleState* leader = nearest_leader(world, agent, agent.lane, road);
    if (leader == nullptr || leader->lon_pos - agent.lon_pos > range) {
        flags.no_leader_ahead = true;
    } else if (leader->lon_speed > agent.lon_speed) {
        flags.current_leader_faster = true;
    }

    if (road.has_lane(target)) {
        const VehicleState* target_leader = nearest_leader(world, agent, target, road);
        if (target_leader != nullptr && target_leader->lon_pos - agent.lon_pos <= range &&
            target_leader->lon_speed < agent.lon_speed) {
            flags.target_leader_slower = true;
        }
    }
    return flags;
}

}  // namespace lcstf
