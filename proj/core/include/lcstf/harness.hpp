#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "lcstf/madqn.hpp"

namespace lcstf {

struct EvalSummary {
    double agent_fraction = 0.0;
    double mean_speed = 0.0;  ///< [m/s] mean over steps of the evaluation-zone mean; NaN if never occupied
    /// Agent-involved collisions per 1000 completed agent lane changes; absent when no lane change completed.
    std::optional<double> collision_rate_per_1k_lc;
    std::optional<double> mean_comfort;  ///< mean r_c over agent steps; absent without agents
    int episodes = 0;

    std::int64_t collisions = 0;  ///< all collision events
    std::int64_t agent_collisions = 0;
    std::int64_t agent_lane_changes = 0;
    std::int64_t lane_changes = 0;
    std::int64_t agent_steps = 0;
    std::optional<double> mean_reward;
    std::optional<double> mean_agent_speed;
};

struct TraceSample {
    double time_s = 0.0;
    double lon_pos = 0.0;
    double speed = 0.0;
};

/// Mean-speed grid over (time, position); cell (t, s) covers
/// [t * time_bin, (t+1) * time_bin) x [origin + s * space_bin, ...).
class SpaceTimeGrid {
public:
    static constexpr double kEmpty = -1.0;

    SpaceTimeGrid(double space_origin_m, double space_length_m, double duration_s, double space_bin_m = 100.0,
                  double time_bin_s = 10.0);

    /// Samples outside the grid are ignored; the far edges belong to the last bins.
    void add(const TraceSample& sample);

    int time_bins() const { return time_bins_; }
    int space_bins() const { return space_bins_; }
    double time_bin_s() const { return time_bin_; }
    double space_bin_m() const { return space_bin_; }
    double time_edge(int t) const { return t * time_bin_; }
    double space_edge(int s) const { return origin_ + s * space_bin_; }

    /// kEmpty for a cell without samples.
    double mean(int t, int s) const;
    std::int64_t count(int t, int s) const;

private:
    std::size_t cell(int t, int s) const { return static_cast<std::size_t>(t) * space_bins_ + s; }

    double origin_;
    double length_;
    double duration_;
    double space_bin_;
    double time_bin_;
    int time_bins_;
    int space_bins_;
    std::vector<double> sum_;
    std::vector<std::int64_t> count_;
};

/// Grid over the evaluation zone of `road` for `duration_s` seconds.
SpaceTimeGrid space_time_bins(std::span<const TraceSample> trace, const RoadSegment& road, double duration_s);

void write_spacetime_csv(const SpaceTimeGrid& grid, const std::filesystem::path& path, std::string_view comment);

/// Greedy rollouts of `net`. With `out_dir`, writes timeseries.csv (metrics
/// layout, one row per episode), spacetime.csv and summary.csv there.
/// Throws std::invalid_argument when the network does not fit the config.
EvalSummary run_eval(const ExperimentConfig& config, const DenseNet& net, int episodes,
                     const std::optional<std::filesystem::path>& out_dir = std::nullopt);

/// Loads the checkpoint against the configured architecture first.
EvalSummary run_eval(const ExperimentConfig& config, const std::filesystem::path& checkpoint, int episodes,
                     const std::optional<std::filesystem::path>& out_dir = std::nullopt);

/// Seed used for the sweep point at `fraction_index`.
std::uint64_t sweep_seed(std::uint64_t master, std::size_t fraction_index);

/// One evaluation per fraction; writes sweep.csv under `out_dir`.
std::vector<EvalSummary> run_density_sweep(const ExperimentConfig& config, const DenseNet& net,
                                           std::span<const double> fractions, int episodes,
                                           const std::filesystem::path& out_dir);

}  // namespace lcstf
