#include "lcstf/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace lcstf {

namespace {

std::string sizes_string(const std::vector<int>& sizes) {
    std::string out;
    for (int s : sizes) {
        out += (out.empty() ? "" : ",") + std::to_string(s);
    }
    return out;
}

std::string optional_field(const std::optional<double>& v) {
    return v && !std::isnan(*v) ? format_number(*v) : std::string();
}

std::string field(double v) { return std::isnan(v) ? std::string() : format_number(v); }

int bins(double length, double bin) {
    return std::max(1, static_cast<int>(std::ceil(length / bin - 1e-9)));
}

}  // namespace

SpaceTimeGrid::SpaceTimeGrid(double space_origin_m, double space_length_m, double duration_s, double space_bin_m,
                             double time_bin_s)
    : origin_(space_origin_m),
      length_(space_length_m),
      duration_(duration_s),
      space_bin_(space_bin_m),
      time_bin_(time_bin_s) {
    if (!(space_length_m > 0) || !(duration_s > 0) || !(space_bin_m > 0) || !(time_bin_s > 0)) {
        throw std::invalid_argument("space-time grid: lengths and bin sizes must be positive");
    }
    time_bins_ = bins(duration_s, time_bin_s);
    space_bins_ = bins(space_length_m, space_bin_m);
    sum_.assign(static_cast<std::size_t>(time_bins_) * space_bins_, 0.0);
    count_.assign(sum_.size(), 0);
}

void SpaceTimeGrid::add(const TraceSample& sample) {
    const double x = sample.lon_pos - origin_;
    if (x < 0 || x > length_ || sample.time_s < 0 || sample.time_s > duration_) {
        return;
    }
    const int s = std::min(space_bins_ - 1, static_cast<int>(x / space_bin_));
    const int t = std::min(time_bins_ - 1, static_cast<int>(sample.time_s / time_bin_));
    sum_[cell(t, s)] += sample.speed;
    ++count_[cell(t, s)];
}

double SpaceTimeGrid::mean(int t, int s) const {
    const std::int64_t n = count_.at(cell(t, s));
    return n == 0 ? kEmpty : sum_[cell(t, s)] / static_cast<double>(n);
}

std::int64_t SpaceTimeGrid::count(int t, int s) const { return count_.at(cell(t, s)); }

SpaceTimeGrid space_time_bins(std::span<const TraceSample> trace, const RoadSegment& road, double duration_s) {
    SpaceTimeGrid grid(road.warmup_length, road.evaluation_length(), duration_s);
    for (const TraceSample& sample : trace) {
        grid.add(sample);
    }
    return grid;
}

void write_spacetime_csv(const SpaceTimeGrid& grid, const std::filesystem::path& path, std::string_view comment) {
    CsvWriter csv(path, comment, {"time_bin_s", "space_bin_m", "mean_speed_mps"});
    for (int t = 0; t < grid.time_bins(); ++t) {
        for (int s = 0; s < grid.space_bins(); ++s) {
            csv.row({format_number(grid.time_edge(t)), format_number(grid.space_edge(s)),
                     format_number(grid.mean(t, s))});
        }
    }
}

EvalSummary run_eval(const ExperimentConfig& config, const DenseNet& net, int episodes,
                     const std::optional<std::filesystem::path>& out_dir) {
    config.validate();
    if (episodes < 0) {
        throw std::invalid_argument("eval: episode count must be non-negative");
    }
    TrafficEnv env(config.sim, config.normalization, config.reward);
    const std::vector<int> expected = config.trainer.layer_sizes(env.observation_size());
    if (net.layer_sizes() != expected) {
        throw std::invalid_argument("eval: network architecture " + sizes_string(net.layer_sizes()) +
                                    " does not match configured " + sizes_string(expected));
    }

    const std::string comment = "seed=" + std::to_string(config.sim.seed) +
                                " epsilon=0 collision_rate=agent collisions per 1000 completed agent lane changes";
    std::optional<CsvWriter> timeseries;
    if (out_dir) {
        ensure_writable_directory(*out_dir);
        timeseries.emplace(open_metrics_csv(*out_dir / "timeseries.csv", comment));
    }
    SpaceTimeGrid grid(config.sim.road.warmup_length, config.sim.road.evaluation_length(),
                       config.sim.episode_steps * config.sim.dt);

    const std::uint64_t eval_master = derive_seed(config.sim.seed, 4);
    double speed_sum = 0.0;
    std::int64_t speed_samples = 0;
    double comfort_sum = 0.0;
    double reward_sum = 0.0;
    double agent_speed_sum = 0.0;
    EvalSummary summary;
    summary.agent_fraction = config.sim.agent_fraction;
    summary.episodes = episodes;

    for (int e = 1; e <= episodes; ++e) {
        env.reset(episode_seed(eval_master, e));
        EpisodeAccumulator acc;
        for (int t = 0; t < config.sim.episode_steps; ++t) {
            if (config.sim.injection_rate == 0.0 && env.state().vehicles.empty()) {
                break;
            }
            ActionMap actions;
            for (const auto& [id, obs] : env.observations()) {
                actions.emplace(id, action_from_index(argmax(net.forward(obs))));
            }
            const EnvStep s = env.step(actions);
            acc.add_step(s, env.state());

            if (s.stats.vehicle_count > 0) {
                speed_sum += s.stats.mean_speed;
                ++speed_samples;
            }
            const double time_s = (t + 1) * config.sim.dt;
            for (const VehicleState& v : env.state().vehicles) {
                grid.add(TraceSample{time_s, v.lon_pos, v.lon_speed});
            }
            for (const AgentStep& a : s.agents) {
                comfort_sum += a.reward.r_c;
                reward_sum += a.reward.total;
                agent_speed_sum += a.speed_after;
            }
        }
        const EpisodeMetrics m = acc.snapshot(e, env.state(), config.sim.dt, 0.0);
        summary.collisions += m.collisions;
        summary.agent_collisions += m.agent_collisions;
        summary.agent_lane_changes += m.agent_lane_changes;
        summary.lane_changes += m.lane_changes;
        summary.agent_steps += m.agent_steps;
        if (timeseries) {
            timeseries->row(metrics_row(m));
        }
    }

    summary.mean_speed = speed_samples > 0 ? speed_sum / static_cast<double>(speed_samples)
                                           : std::numeric_limits<double>::quiet_NaN();
    if (summary.agent_lane_changes > 0) {
        summary.collision_rate_per_1k_lc =
            1000.0 * static_cast<double>(summary.agent_collisions) / static_cast<double>(summary.agent_lane_changes);
    }
    if (summary.agent_steps > 0) {
        const auto n = static_cast<double>(summary.agent_steps);
        summary.mean_comfort = comfort_sum / n;
        summary.mean_reward = reward_sum / n;
        summary.mean_agent_speed = agent_speed_sum / n;
    }

    if (out_dir) {
        write_spacetime_csv(grid, *out_dir / "spacetime.csv", comment);
        CsvWriter csv(*out_dir / "summary.csv", comment,
                      {"agent_fraction", "mean_speed_mps", "collision_rate_per_1k_lc", "mean_comfort", "episodes",
                       "collisions", "agent_collisions", "agent_lane_changes", "lane_changes", "agent_steps",
                       "mean_reward", "mean_agent_speed_mps"});
        csv.row({format_number(summary.agent_fraction), field(summary.mean_speed),
                 optional_field(summary.collision_rate_per_1k_lc), optional_field(summary.mean_comfort),
                 format_number(summary.episodes), format_number(summary.collisions),
                 format_number(summary.agent_collisions), format_number(summary.agent_lane_changes),
                 format_number(summary.lane_changes), format_number(summary.agent_steps),
                 optional_field(summary.mean_reward), optional_field(summary.mean_agent_speed)});
    }
    return summary;
}

EvalSummary run_eval(const ExperimentConfig& config, const std::filesystem::path& checkpoint, int episodes,
                     const std::optional<std::filesystem::path>& out_dir) {
    const int obs = observation_size(config.sim.road.lane_count);
    const DenseNet net = load_checkpoint(checkpoint, config.trainer.layer_sizes(obs));
    return run_eval(config, net, episodes, out_dir);
}

std::uint64_t sweep_seed(std::uint64_t master, std::size_t fraction_index) {
    return derive_seed(derive_seed(master, 5), fraction_index);
}

std::vector<EvalSummary> run_density_sweep(const ExperimentConfig& config, const DenseNet& net,
                                           std::span<const double> fractions, int episodes,
                                           const std::filesystem::path& out_dir) {
    if (fractions.empty()) {
        throw std::invalid_argument("sweep: need at least one agent fraction");
    }
    for (double f : fractions) {
        if (!(f >= 0.0 && f <= 1.0)) {
            throw std::invalid_argument("sweep: agent fraction " + format_number(f) + " outside [0, 1]");
        }
    }
    ensure_writable_directory(out_dir);
    CsvWriter csv(out_dir / "sweep.csv",
                  "seed=" + std::to_string(config.sim.seed) +
                      " epsilon=0 collision_rate=agent collisions per 1000 completed agent lane changes",
                  {"agent_fraction", "mean_speed_mps", "collision_rate_per_1k_lc", "mean_comfort", "episodes"});

    std::vector<EvalSummary> out;
    for (std::size_t i = 0; i < fractions.size(); ++i) {
        ExperimentConfig point = config;
        point.sim.agent_fraction = fractions[i];
        point.sim.seed = sweep_seed(config.sim.seed, i);
        EvalSummary s = run_eval(point, net, episodes);
        csv.row({format_number(s.agent_fraction), field(s.mean_speed), optional_field(s.collision_rate_per_1k_lc),
                 optional_field(s.mean_comfort), format_number(s.episodes)});
        csv.flush();
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace lcstf
