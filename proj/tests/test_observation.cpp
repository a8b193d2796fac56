#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "lcstf/env.hpp"

using namespace lcstf;

namespace {

struct Scene {
    RoadSegment road;
    SegmentStats stats;
    ObservationParams params;
    RewardParams reward;
    ObservationContext ctx() const { return {&road, &stats, &params, &reward, 0.1, 100.0}; }
};

VehicleState vehicle(std::int64_t id, double lon, int lane, double speed = 20.0) {
    VehicleState v;
    v.id = id;
    v.lon_pos = lon;
    v.lane = lane;
    v.lat_pos = (lane + 0.5) * 3.2;
    v.lon_speed = speed;
    return v;
}

}  // namespace

TEST(Observation, DefaultLengthIsForty) {
    EXPECT_EQ(observation_size(5), 40);
    EXPECT_EQ(observation_size(3), 36);
    TrafficEnv env(SimConfig{}, ObservationParams{}, RewardParams{});
    EXPECT_EQ(env.observation_size(), 40);
}

TEST(Observation, LoneAgentOnEmptyRoad) {
    Scene s;
    std::vector<VehicleState> w = {vehicle(3, 200.0, 2)};
    s.stats = segment_stats(w, s.road);
    const Observation o = observe(w, 3, s.ctx());
    ASSERT_EQ(o.size(), 40u);
    for (int i = 5; i < 23; ++i) EXPECT_EQ(o[i], 0.0f) << i;
    for (int lane = 0; lane < 5; ++lane) {
        EXPECT_FLOAT_EQ(o[30 + 2 * lane], static_cast<float>(s.road.v_max / 50.0));
        EXPECT_FLOAT_EQ(o[31 + 2 * lane], 0.0f);
    }
}

TEST(Observation, LayoutValues) {
    Scene s;
    VehicleState ego = vehicle(0, 1000.0, 1, 25.0);
    ego.lat_speed = 3.2;
    ego.accel = -1.3;
    VehicleState n = vehicle(1, 1040.0, 2, 30.0);
    n.accel = 2.6;
    n.sigma = 0.4;
    std::vector<VehicleState> w = {ego, n};
    s.stats = segment_stats(w, s.road);
    const Observation o = observe(w, 0, s.ctx());

    const double width = s.road.width();
    const std::vector<double> expected_head = {1000.0 / 3500.0, 4.8 / width, 0.5, 3.2 / 5.0, -0.5,
                                               0.4,             3.2 / width, 0.6, 0.0,       1.0, 0.4};
    for (std::size_t i = 0; i < expected_head.size(); ++i) {
        EXPECT_FLOAT_EQ(o[i], static_cast<float>(expected_head[i])) << i;
    }
    EXPECT_FLOAT_EQ(o[23], static_cast<float>(2.0 / 3000.0 / 0.15));
    EXPECT_FLOAT_EQ(o[24], static_cast<float>(27.5 / 50.0));
    EXPECT_FLOAT_EQ(o[25], static_cast<float>(s.road.v_max / 50.0));
    EXPECT_FLOAT_EQ(o[26], 5.0f / 8.0f);
    EXPECT_FLOAT_EQ(o[27], 0.1f);
    EXPECT_FLOAT_EQ(o[28], 0.25f);
    EXPECT_FLOAT_EQ(o[29], 0.1f);
    EXPECT_FLOAT_EQ(o[32], 0.5f);   // lane 1 speed
    EXPECT_FLOAT_EQ(o[34], 0.6f);   // lane 2 speed
}

TEST(Observation, UnknownAgentThrows) {
    Scene s;
    std::vector<VehicleState> w = {vehicle(3, 200.0, 2)};
    s.stats = segment_stats(w, s.road);
    EXPECT_THROW(observe(w, 4, s.ctx()), std::invalid_argument);
}

TEST(Observation, NearestThreeOfFive) {
    Scene s;
    std::vector<VehicleState> w = {vehicle(0, 1000, 2), vehicle(1, 1090, 1), vehicle(2, 970, 3),
                                   vehicle(3, 1010, 0), vehicle(4, 1050, 4), vehicle(5, 920, 2)};
    s.stats = segment_stats(w, s.road);
    const Observation o = observe(w, 0, s.ctx());
    EXPECT_FLOAT_EQ(o[5], 0.1f);
    EXPECT_FLOAT_EQ(o[11], -0.3f);
    EXPECT_FLOAT_EQ(o[17], 0.5f);
    for (std::size_t i = 0; i < o.size(); ++i) {
        EXPECT_NE(o[i], 0.9f);
        EXPECT_NE(o[i], -0.8f);
    }
}

TEST(Observation, EqualDistanceTieGoesToLowerId) {
    VehicleState ego = vehicle(5, 1000, 2);
    std::vector<VehicleState> w = {ego, vehicle(9, 1020, 1), vehicle(7, 980, 3), vehicle(8, 1020, 4),
                                   vehicle(6, 980, 1)};
    const auto n = select_neighbors(w, ego, 100.0);
    ASSERT_EQ(n.size(), 3u);
    EXPECT_EQ(n[0]->id, 6);
    EXPECT_EQ(n[1]->id, 7);
    EXPECT_EQ(n[2]->id, 8);
}

TEST(Observation, RangeIsInclusive) {
    VehicleState ego = vehicle(0, 1000, 2);
    std::vector<VehicleState> w = {ego, vehicle(1, 1100, 2), vehicle(2, 899.9, 2)};
    const auto n = select_neighbors(w, ego, 100.0);
    ASSERT_EQ(n.size(), 1u);
    EXPECT_EQ(n[0]->id, 1);
}

TEST(Observation, RandomStatesMatchSortOracleAndWriteOnce) {
    Scene s;
    Rng rng(21);
    for (int k = 0; k < 500; ++k) {
        auto w = fixtures::random_world(rng, s.road, 1 + static_cast<int>(rng.uniform_index(12)),
                                        rng.uniform(0, 3500), 150.0);
        s.stats = segment_stats(w, s.road);
        const VehicleState& ego = w[rng.uniform_index(w.size())];

        std::vector<const VehicleState*> oracle;
        for (const auto& v : w) {
            if (v.id != ego.id && std::abs(v.lon_pos - ego.lon_pos) <= 100.0) oracle.push_back(&v);
        }
        std::sort(oracle.begin(), oracle.end(), [&](auto* a, auto* b) {
            const double da = std::abs(a->lon_pos - ego.lon_pos), db = std::abs(b->lon_pos - ego.lon_pos);
            return da < db || (da == db && a->id < b->id);
        });
        oracle.resize(std::min<std::size_t>(oracle.size(), 3));
        const auto got = select_neighbors(w, ego, 100.0);
        ASSERT_EQ(got, oracle);

        std::vector<int> counts;
        const Observation o = observe(w, ego.id, s.ctx(), &counts);
        ASSERT_EQ(counts, std::vector<int>(40, 1));
        for (std::size_t slot = got.size(); slot < 3; ++slot) {
            for (int f = 0; f < 6; ++f) ASSERT_EQ(o[5 + 6 * slot + f], 0.0f);
        }
        for (float x : o) ASSERT_TRUE(std::isfinite(x));
    }
}

TEST(Observation, DeterministicAndConvenienceOverloadAgrees) {
    SimConfig c;
    c.agent_fraction = 0.5;
    SimState st = reset(c, 3);
    for (int t = 0; t < 600; ++t) {
        ActionMap a;
        for (auto id : st.agent_ids()) a.emplace(id, AgentAction::keep);
        step(st, a, c);
    }
    ASSERT_FALSE(st.agent_ids().empty());
    const auto id = st.agent_ids().front();
    const Observation a = observe(st, id, c, ObservationParams{}, RewardParams{});
    const Observation b = observe(st, id, c, ObservationParams{}, RewardParams{});
    EXPECT_EQ(a, b);
    const SegmentStats stats = segment_stats(st.vehicles, c.road);
    ObservationParams p;
    RewardParams r;
    ObservationContext ctx{&c.road, &stats, &p, &r, c.dt, c.surround_range};
    EXPECT_EQ(observe(st.vehicles, id, ctx), a);
}
