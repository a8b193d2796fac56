#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "fixtures.hpp"
#include "lcstf/env.hpp"
#include "reward_oracle.hpp"

using namespace lcstf;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

VehicleState car(std::int64_t id, double lon, int lane, double speed = 20.0) {
    VehicleState v;
    v.id = id;
    v.lon_pos = lon;
    v.lane = lane;
    v.lat_pos = (lane + 0.5) * 3.2;
    v.lon_speed = speed;
    return v;
}

VehicleState maneuvering(VehicleState v, int target) {
    v.maneuver = Maneuver{target > v.lane ? Direction::left : Direction::right, v.lane, target, 1, 10};
    v.lat_pos += (target - v.lane) * 0.32;
    return v;
}

}  // namespace

TEST(Efficiency, Examples) {
    RoadSegment r;
    EXPECT_EQ(efficiency_score(r.v_min, r.v_min, r.v_max), 0.0);
    EXPECT_DOUBLE_EQ(efficiency_score(0.0, r.v_min, r.v_max), -1.0);
    EXPECT_NEAR(efficiency_score(r.v_max, r.v_min, r.v_max), 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(efficiency_score(1.1 * r.v_max, r.v_min, r.v_max), -0.1, 1e-15);
    const EfficiencyReward e = efficiency_reward(r.v_min, r.v_max, r);
    EXPECT_EQ(e.g_e, 0.0);
    EXPECT_NEAR(e.l_e, 2.0 / 3.0, 1e-15);
    EXPECT_DOUBLE_EQ(e.r_e, e.g_e + e.l_e);
}

TEST(Efficiency, UpperBranchVanishesAtVmaxButMiddleBranchOwnsIt) {
    RoadSegment r;
    const double above = std::nextafter(r.v_max, 100.0);
    EXPECT_LT(std::abs(efficiency_score(above, r.v_min, r.v_max)), 1e-15);
    EXPECT_LE(efficiency_score(above, r.v_min, r.v_max), 0.0);
    EXPECT_NEAR(efficiency_score(r.v_max, r.v_min, r.v_max), (r.v_max - r.v_min) / r.v_min, 1e-15);
}

TEST(Efficiency, ContinuousAtVmin) {
    RoadSegment r;
    const double below = std::nextafter(r.v_min, 0.0);
    EXPECT_LT(std::abs(efficiency_score(below, r.v_min, r.v_max)), 1e-15);
}

TEST(Efficiency, BoundedBelowOnPhysicalRange) {
    RoadSegment r;
    for (double v = 0.0; v <= 50.0; v += 0.01) {
        ASSERT_GE(efficiency_score(v, r.v_min, r.v_max), -1.0);
    }
}

TEST(Safety, LongitudinalBranches) {
    RoadSegment r;
    RewardParams p;
    const VehicleState me = car(0, 100, 1);
    for (auto [gap, expected] : std::vector<std::pair<double, double>>{
             {2.5, 0.0}, {0.0, -1.0}, {1.25, -0.5}, {3.0, 0.0}, {-4.0, -1.0}}) {
        std::vector<VehicleState> w = {me, car(1, 100 + 5 + gap, 1)};
        const SafetyReward s = safety_reward(w, me, false, r, p);
        EXPECT_DOUBLE_EQ(s.d_long, gap);
        EXPECT_EQ(s.l_lon, expected) << gap;
    }
    std::vector<VehicleState> alone = {me};
    EXPECT_EQ(safety_reward(alone, me, false, r, p).d_long, kInf);
    EXPECT_EQ(safety_reward(alone, me, false, r, p).r_s, 0.0);
}

TEST(Safety, LongitudinalOnlyDuringManeuverFlag) {
    RoadSegment r;
    RewardParams p;
    p.lon_only_during_maneuver = true;
    const VehicleState me = car(0, 100, 1);
    std::vector<VehicleState> w = {me, car(1, 106, 1)};
    EXPECT_EQ(safety_reward(w, me, false, r, p).l_lon, 0.0);
    const VehicleState m = maneuvering(me, 2);
    w[0] = m;
    EXPECT_DOUBLE_EQ(safety_reward(w, m, false, r, p).l_lon, -0.6);
}

TEST(Safety, LateralBranches) {
    RoadSegment r;
    RewardParams p;
    const VehicleState me = maneuvering(car(0, 100, 1), 2);
    for (auto [d, expected] : std::vector<std::pair<double, double>>{
             {4.0, -0.6}, {10.0, 0.0}, {12.0, 0.0}, {0.0, -1.0}, {-3.0, -1.0}}) {
        std::vector<VehicleState> ahead = {me, car(1, 100 + 5 + d, 2)};
        const SafetyReward s = safety_reward(ahead, me, false, r, p);
        EXPECT_NEAR(s.l_lat, expected, 1e-15) << d;
        std::vector<VehicleState> behind = {me, car(1, 100 - 5 - d, 2)};
        EXPECT_NEAR(safety_reward(behind, me, false, r, p).l_lat, expected, 1e-15) << d;
    }
    // Not evaluated outside a maneuver.
    const VehicleState still = car(0, 100, 1);
    std::vector<VehicleState> w = {still, car(1, 106, 2)};
    const SafetyReward s = safety_reward(w, still, false, r, p);
    EXPECT_EQ(s.l_lat, 0.0);
    EXPECT_EQ(s.d_lat, kInf);
}

TEST(Safety, CollisionTerm) {
    RoadSegment r;
    RewardParams p;
    const VehicleState me = car(0, 100, 1);
    std::vector<VehicleState> w = {me};
    EXPECT_EQ(safety_reward(w, me, true, r, p).l_col, -5.0);
    EXPECT_EQ(safety_reward(w, me, false, r, p).l_col, 0.0);
}

TEST(Comfort, Examples) {
    RewardParams p;
    EXPECT_EQ(comfort_reward(1.0, 1.0, 0.1, p), 0.0);
    EXPECT_NEAR(comfort_reward(-2.6, 2.6, 0.1, p), -1.0, 1e-12);
    EXPECT_NEAR(comfort_reward(0.0, 2.6, 0.1, p), -0.25, 1e-12);
    EXPECT_NEAR(comfort_reward(2.6, 0.0, 0.1, p), -0.25, 1e-12);
}

TEST(Comfort, LiteralMode) {
    RewardParams p;
    p.comfort_literal = true;
    EXPECT_NEAR(comfort_reward(0.0, 2.6, 0.1, p), -2.6 / (52.0 * 52.0), 1e-15);
    EXPECT_GT(comfort_reward(2.6, 0.0, 0.1, p), 0.0);
}

TEST(Comfort, RangeOverInBoundAccelerations) {
    RewardParams p;
    Rng rng(2);
    for (int i = 0; i < 100000; ++i) {
        const double r = comfort_reward(rng.uniform(-2.6, 2.6), rng.uniform(-2.6, 2.6), 0.1, p);
        ASSERT_LE(r, 0.0);
        ASSERT_GE(r, -1.0);
    }
}

TEST(Utility, Cases) {
    RoadSegment r;
    const VehicleState me = car(0, 100, 2, 20.0);
    std::vector<VehicleState> w = {me, car(1, 150, 2, 20.0)};
    EXPECT_EQ(utility_reward(w, AgentAction::keep, me, r, 100), 0.0);
    EXPECT_EQ(utility_reward(w, AgentAction::accelerate, me, r, 100), 0.0);
    EXPECT_EQ(utility_reward(w, AgentAction::left, me, r, 100), 0.0);

    const VehicleState top = car(0, 100, 4, 20.0);
    std::vector<VehicleState> tw = {top, car(1, 150, 4, 20.0)};
    EXPECT_EQ(utility_reward(tw, AgentAction::left, top, r, 100), -0.5);
    const VehicleState bottom = car(0, 100, 0, 20.0);
    std::vector<VehicleState> bw = {bottom, car(1, 150, 0, 20.0)};
    EXPECT_EQ(utility_reward(bw, AgentAction::right, bottom, r, 100), -0.5);

    std::vector<VehicleState> empty = {bottom};
    EXPECT_EQ(utility_reward(empty, AgentAction::right, bottom, r, 100), -5.5);
    std::vector<VehicleState> empty_mid = {me};
    EXPECT_EQ(utility_reward(empty_mid, AgentAction::right, me, r, 100), -5.0);
    std::vector<VehicleState> far = {me, car(1, 201, 2)};
    EXPECT_EQ(utility_reward(far, AgentAction::left, me, r, 100), -5.0);

    std::vector<VehicleState> faster = {me, car(1, 150, 2, 25.0)};
    EXPECT_EQ(utility_reward(faster, AgentAction::left, me, r, 100), -0.5);
    std::vector<VehicleState> slower_target = {me, car(1, 150, 2, 20.0), car(2, 130, 3, 15.0)};
    EXPECT_EQ(utility_reward(slower_target, AgentAction::left, me, r, 100), -0.5);
    std::vector<VehicleState> both = {me, car(1, 150, 2, 25.0), car(2, 130, 1, 15.0)};
    EXPECT_EQ(utility_reward(both, AgentAction::right, me, r, 100), -1.0);
}

TEST(Utility, NoPenaltyWhileManeuvering) {
    RoadSegment r;
    const VehicleState me = maneuvering(car(0, 100, 4), 3);
    std::vector<VehicleState> w = {me};
    EXPECT_EQ(utility_reward(w, AgentAction::left, me, r, 100), 0.0);
    EXPECT_FALSE(lane_change_flags(w, me, AgentAction::left, r, 100).any());
}

TEST(Utility, RangeOfValues) {
    Rng rng(5);
    for (int i = 0; i < 5000; ++i) {
        const auto f = fixtures::random_reward_fixture(rng);
        const double u = utility_reward(f.before, f.action, f.agent_before, f.road, 100.0);
        ASSERT_TRUE(u == 0.0 || (u >= -6.0 && u <= -0.5)) << u;
    }
}

TEST(Reward, TotalIsWeightedSum) {
    RewardWeights w{1, 1, 1, 1};
    EXPECT_DOUBLE_EQ(weighted_total(w, 0.5, -1.0, 0.0, -0.5), -1.0);
    EXPECT_EQ(weighted_total(RewardWeights{3, 7, 2, 9}, 0, 0, 0, 0), 0.0);
}

TEST(Reward, ScalingWeightsScalesTotalOnly) {
    Rng rng(6);
    for (int i = 0; i < 200; ++i) {
        auto f = fixtures::random_reward_fixture(rng);
        const auto flags = lane_change_flags(f.before, f.agent_before, f.action, f.road, f.range);
        const auto world = f.world_after();
        const auto stats = segment_stats(f.survivors, f.road);
        const RewardBreakdown a = reward(flags, world, f.agent_after, f.collided, stats, f.road, f.params, f.dt);
        RewardParams scaled = f.params;
        scaled.weights = {3 * f.params.weights.w1, 3 * f.params.weights.w2, 3 * f.params.weights.w3,
                          3 * f.params.weights.w4};
        const RewardBreakdown b = reward(flags, world, f.agent_after, f.collided, stats, f.road, scaled, f.dt);
        ASSERT_NEAR(b.total, 3 * a.total, 1e-12);
        ASSERT_EQ(a.r_e(), b.r_e());
        ASSERT_EQ(a.r_s(), b.r_s());
        ASSERT_EQ(a.r_c, b.r_c);
        ASSERT_EQ(a.r_u, b.r_u);
    }
}

TEST(Reward, MatchesOracleOnRandomFixtures) {
    Rng rng(12345);
    for (int i = 0; i < 2000; ++i) {
        const auto f = fixtures::random_reward_fixture(rng);
        const auto world = f.world_after();
        const auto flags = lane_change_flags(f.before, f.agent_before, f.action, f.road, f.range);
        const auto got = reward(flags, world, f.agent_after, f.collided, segment_stats(f.survivors, f.road), f.road,
                                f.params, f.dt);
        const auto want = oracle::reward(f.before, f.agent_before, f.action, world, f.survivors, f.agent_after,
                                         f.collided, f.road, f.params, f.dt, f.range);
        ASSERT_NEAR(got.efficiency.g_e, want.g_e, 1e-9) << i;
        ASSERT_NEAR(got.efficiency.l_e, want.l_e, 1e-9) << i;
        ASSERT_NEAR(got.safety.l_lon, want.l_lon, 1e-9) << i;
        ASSERT_NEAR(got.safety.l_lat, want.l_lat, 1e-9) << i;
        ASSERT_EQ(got.safety.l_col, want.l_col) << i;
        ASSERT_NEAR(got.r_c, want.r_c, 1e-9) << i;
        ASSERT_EQ(got.r_u, want.r_u) << i;
        ASSERT_NEAR(got.total, want.total, 1e-9) << i;
    }
}
