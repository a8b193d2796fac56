#include "lcstf/hv_models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lcstf {

void IdmParams::validate() const {
    if (!(v0 > 0) || !(time_headway > 0) || !(a_max > 0) || !(comfortable_decel > 0) ||
        !(min_gap > 0) || !(delta > 0)) {
        throw std::invalid_argument("idm: all parameters must be positive");
    }
    if (a_max > kAccelBound) {
        throw std::invalid_argument("idm: a_max exceeds the global acceleration bound");
    }
}

void MobilParams::validate() const {
    if (!(politeness >= 0.0 && politeness <= 1.0)) {
        throw std::invalid_argument("mobil: politeness must lie in [0, 1]");
    }
    if (!(safe_decel > 0.0)) {
        throw std::invalid_argument("mobil: safe_decel must be positive");
    }
}

double idm_acceleration(double ego_speed, double gap, std::optional<double> leader_speed,
                        const IdmParams& p) {
    const double free_term = std::pow(ego_speed / p.v0, p.delta);
    double interaction = 0.0;
    if (leader_speed) {
        if (gap <= 0.0) {
            return -kAccelBound;
        }
        const double closing = ego_speed - *leader_speed;
        // Dynamic part floored at zero so s* never drops below s0.
        const double dynamic =
            ego_speed * p.time_headway +
            ego_speed * closing / (2.0 * std::sqrt(p.a_max * p.comfortable_decel));
        const double ratio = (p.min_gap + std::max(0.0, dynamic)) / gap;
        interaction = ratio * ratio;
    }
    const double a = p.a_max * (1.0 - free_term - interaction);
    return std::clamp(a, -kAccelBound, kAccelBound);
}

namespace {

double accel_behind(const Neighbor& self, const std::optional<Neighbor>& ahead, const IdmParams& ip) {
    if (!ahead) {
        return idm_acceleration(self.speed, 0.0, std::nullopt, ip);
    }
    return idm_acceleration(self.speed, ahead->gap, ahead->speed, ip);
}

}  // namespace

std::optional<double> mobil_incentive(const MobilInput& in, const LaneNeighbors& target,
                                      const MobilParams& mp, const IdmParams& ip) {
    const Neighbor ego{0.0, in.speed};

    // New follower: currently behind the target leader, afterwards behind ego.
    double new_follower_gain = 0.0;
    if (target.follower) {
        const Neighbor& n = *target.follower;
        std::optional<Neighbor> before;
        if (target.leader) {
            before = Neighbor{n.gap + in.body_length + target.leader->gap, target.leader->speed};
        }
        const double after = accel_behind(n, Neighbor{n.gap, in.speed}, ip);
        if (after < -mp.safe_decel) {
            return std::nullopt;
        }
        new_follower_gain = after - accel_behind(n, before, ip);
    }

    // Old follower: currently behind ego, afterwards behind the current leader.
    double old_follower_gain = 0.0;
    if (in.current.follower) {
        const Neighbor& o = *in.current.follower;
        std::optional<Neighbor> after;
        if (in.current.leader) {
            after = Neighbor{o.gap + in.body_length + in.current.leader->gap,
                             in.current.leader->speed};
        }
        old_follower_gain = accel_behind(o, after, ip) - accel_behind(o, Neighbor{o.gap, in.speed}, ip);
    }

    const double own_gain = accel_behind(ego, target.leader, ip) - accel_behind(ego, in.current.leader, ip);
    return own_gain + mp.politeness * (new_follower_gain + old_follower_gain);
}

std::optional<Direction> mobil_decide(const MobilInput& in, const MobilParams& mp,
                                      const IdmParams& ip) {
    std::optional<double> left_gain;
    std::optional<double> right_gain;
    if (in.left) {
        left_gain = mobil_incentive(in, *in.left, mp, ip);
    }
    if (in.right) {
        right_gain = mobil_incentive(in, *in.right, mp, ip);
    }
    const bool left_ok = left_gain && *left_gain > mp.accel_threshold;
    const bool right_ok = right_gain && *right_gain > mp.accel_threshold;
    if (left_ok && (!right_ok || *left_gain >= *right_gain)) {
        return Direction::left;
    }
    if (right_ok) {
        return Direction::right;
    }
    return std::nullopt;
}

double apply_imperfection(double accel, double sigma, double u) {
    return std::clamp(accel - sigma * kAccelBound * u, -kAccelBound, kAccelBound);
}

double apply_imperfection(double accel, double sigma, Rng& rng) {
    return apply_imperfection(accel, sigma, rng.uniform01());
}

}  // namespace lcstf
