#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lcstf/env.hpp"

namespace lcstf {

std::vector<const VehicleState*> select_neighbors(std::span<const VehicleState> world,
                                                  const VehicleState& ego, double range) {
    std::vector<const VehicleState*> candidates;
    for (const VehicleState& other : world) {
        if (other.id != ego.id && std::abs(other.lon_pos - ego.lon_pos) <= range) {
            candidates.push_back(&other);
        }
    }
    const auto closer = [&ego](const VehicleState* a, const VehicleState* b) {
        const double da = std::abs(a->lon_pos - ego.lon_pos);
        const double db = std::abs(b->lon_pos - ego.lon_pos);
        return da != db ? da < db : a->id < b->id;
    };
    const auto keep = std::min<std::size_t>(candidates.size(), kNeighborSlots);
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                      candidates.end(), closer);
    candidates.resize(keep);
    return candidates;
}

namespace {

class ObservationWriter {
public:
    ObservationWriter(std::size_t size, std::vector<int>* counts) : values_(size, 0.0f), counts_(counts) {
        if (counts_ != nullptr) {
            counts_->assign(size, 0);
        }
    }

    void put(double value) {
        if (cursor_ >= values_.size()) {
            throw std::logic_error("observation layout overflow");
        }
        if (counts_ != nullptr) {
            ++(*counts_)[cursor_];
        }
        values_[cursor_++] = static_cast<float>(value);
    }

    std::size_t cursor() const { return cursor_; }
    Observation take() { return std::move(values_); }

private:
    Observation values_;
    std::vector<int>* counts_;
    std::size_t cursor_ = 0;
};

}  // namespace

Observation observe(std::span<const VehicleState> world, std::int64_t agent_id,
                    const ObservationContext& ctx, std::vector<int>* write_counts) {
    const auto it = std::find_if(world.begin(), world.end(),
                                 [agent_id](const VehicleState& v) { return v.id == agent_id; });
    if (it == world.end()) {
        throw std::invalid_argument("observe: unknown agent id " + std::to_string(agent_id));
    }
    const VehicleState& ego = *it;
    const RoadSegment& road = *ctx.road;
    const SegmentStats& stats = *ctx.stats;
    const ObservationParams& p = *ctx.params;
    const double road_width = road.width();

    ObservationWriter out(static_cast<std::size_t>(observation_size(road.lane_count)), write_counts);

    out.put(ego.lon_pos / road.total_length);
    out.put(ego.lat_pos / road_width);
    out.put(ego.lon_speed / p.v_cap);
    out.put(ego.lat_speed / p.lat_speed_scale);
    out.put(ego.accel / kAccelBound);

    const auto neighbors = select_neighbors(world, ego, ctx.surround_range);
    for (int slot = 0; slot < kNeighborSlots; ++slot) {
        if (static_cast<std::size_t>(slot) < neighbors.size()) {
            const VehicleState& n = *neighbors[static_cast<std::size_t>(slot)];
            out.put((n.lon_pos - ego.lon_pos) / ctx.surround_range);
            out.put((n.lat_pos - ego.lat_pos) / road_width);
            out.put(n.lon_speed / p.v_cap);
            out.put(n.lat_speed / p.lat_speed_scale);
            out.put(n.accel / kAccelBound);
            out.put(n.sigma);
        } else {
            for (int f = 0; f < kNeighborFeatures; ++f) {
                out.put(0.0);
            }
        }
    }

    out.put(stats.density / p.density_scale);
    out.put(stats.mean_speed / p.v_cap);
    out.put(road.v_max / p.v_cap);
    out.put(road.lane_count / p.lane_count_scale);
    out.put(ctx.reward->t_lat / 100.0);
    out.put(ctx.reward->t_min_gap / 10.0);
    out.put(ctx.dt);

    for (int lane = 0; lane < road.lane_count; ++lane) {
        const auto k = static_cast<std::size_t>(lane);
        out.put(stats.lane_mean_speed[k] / p.v_cap);
        out.put(stats.lane_density[k] / p.density_scale);
    }
    if (out.cursor() != static_cast<std::size_t>(observation_size(road.lane_count))) {
        throw std::logic_error("observation layout underflow");
    }
    return out.take();
}

Observation observe(const SimState& state, std::int64_t agent_id, const SimConfig& config,
                    const ObservationParams& params, const RewardParams& reward) {
    const SegmentStats stats = segment_stats(state.vehicles, config.road);
    ObservationContext ctx{&config.road, &stats, &params, &reward, config.dt, config.surround_range};
    return observe(state.vehicles, agent_id, ctx);
}

}  // namespace lcstf
