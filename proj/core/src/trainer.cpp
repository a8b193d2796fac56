#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "lcstf/config.hpp"
#include "lcstf/madqn.hpp"

namespace lcstf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_or_nan(double sum, std::int64_t n) { return n > 0 ? sum / static_cast<double>(n) : kNaN; }

std::string field(double v) { return std::isnan(v) ? std::string() : format_number(v); }

bool is_agent_id(const StepEvents& events, std::int64_t id) {
    for (const VehicleState& v : events.removed) {
        if (v.id == id) {
            return v.kind.is_agent();
        }
    }
    return false;
}

}  // namespace

bool collision_involves_agent(const StepEvents& events, const CollisionEvent& c) {
    return is_agent_id(events, c.follower) || is_agent_id(events, c.leader);
}

void EpisodeAccumulator::add_step(const EnvStep& step, const SimState&) {
    ++steps_;
    if (step.stats.vehicle_count > 0) {
        speed_sum_ += step.stats.mean_speed;
        ++speed_samples_;
    }
    for (const CollisionEvent& c : step.events.collisions) {
        if (collision_involves_agent(step.events, c)) {
            ++agent_collisions_;
        }
    }
    for (const AgentStep& a : step.agents) {
        ++agent_steps_;
        reward_sum_ += a.reward.total;
        r_e_sum_ += a.reward.r_e();
        r_s_sum_ += a.reward.r_s();
        r_c_sum_ += a.reward.r_c;
        r_u_sum_ += a.reward.r_u;
        agent_speed_sum_ += a.speed_after;
    }
}

void EpisodeAccumulator::add_loss(double loss) {
    loss_sum_ += loss;
    ++loss_count_;
}

EpisodeMetrics EpisodeAccumulator::snapshot(int episode, const SimState& state, double dt, double epsilon) const {
    EpisodeMetrics m;
    m.episode = episode;
    m.step = static_cast<int>(steps_);
    m.sim_time_s = static_cast<double>(steps_) * dt;
    m.mean_speed = mean_or_nan(speed_sum_, speed_samples_);
    m.live_vehicles = static_cast<int>(state.vehicles.size());
    m.collisions = state.counters.collision_events;
    m.lane_changes = state.counters.lane_changes_completed;
    m.agent_collisions = agent_collisions_;
    m.agent_lane_changes = state.counters.agent_lane_changes_completed;
    m.agent_steps = agent_steps_;
    m.mean_reward = mean_or_nan(reward_sum_, agent_steps_);
    m.mean_r_e = mean_or_nan(r_e_sum_, agent_steps_);
    m.mean_r_s = mean_or_nan(r_s_sum_, agent_steps_);
    m.mean_r_c = mean_or_nan(r_c_sum_, agent_steps_);
    m.mean_r_u = mean_or_nan(r_u_sum_, agent_steps_);
    m.mean_agent_speed = mean_or_nan(agent_speed_sum_, agent_steps_);
    m.epsilon = epsilon;
    if (loss_count_ > 0) {
        m.loss = loss_sum_ / static_cast<double>(loss_count_);
    }
    return m;
}

std::uint64_t episode_seed(std::uint64_t master, int episode) {
    return derive_seed(derive_seed(master, 3), static_cast<std::uint64_t>(episode));
}

Trainer::Trainer(ExperimentConfig config)
    : config_((config.validate(), std::move(config))),
      env_(config_.sim, config_.normalization, config_.reward),
      buffer_(config_.trainer.buffer_capacity, env_.observation_size()),
      epsilon_(config_.trainer),
      rng_(derive_seed(config_.sim.seed, 2)) {
    Rng init_rng(derive_seed(config_.sim.seed, 1));
    online_ = DenseNet::init(config_.trainer.layer_sizes(env_.observation_size()), init_rng);
    target_ = online_;
}

EpisodeMetrics Trainer::run_episode(int episode, const std::function<void(const EpisodeMetrics&)>& on_row) {
    const TrainerConfig& tc = config_.trainer;
    env_.reset(episode_seed(config_.sim.seed, episode));
    EpisodeAccumulator acc;

    for (int t = 0; t < config_.sim.episode_steps; ++t) {
        if (config_.sim.injection_rate == 0.0 && env_.state().vehicles.empty()) {
            break;
        }
        ActionMap actions;
        for (const auto& [id, obs] : env_.observations()) {
            actions.emplace(id, action_from_index(select_action(online_, obs, epsilon_.value(), rng_)));
        }
        const EnvStep s = env_.step(actions);
        for (const AgentStep& a : s.agents) {
            buffer_.push(a.observation, action_index(a.action), static_cast<float>(a.reward.total),
                         a.next_observation, a.terminal);
        }
        acc.add_step(s, env_.state());

        ++global_step_;
        if (global_step_ % static_cast<std::uint64_t>(tc.train_interval) == 0) {
            if (const auto loss = train_step(buffer_, online_, target_, tc, epsilon_, rng_)) {
                acc.add_loss(*loss);
                ++updates_;
            }
        }
        if (on_row && tc.log_interval > 0 && (t + 1) % tc.log_interval == 0 && t + 1 < config_.sim.episode_steps) {
            on_row(acc.snapshot(episode, env_.state(), config_.sim.dt, epsilon_.value()));
        }
    }
    return acc.snapshot(episode, env_.state(), config_.sim.dt, epsilon_.value());
}

void Trainer::end_of_episode(int episode) {
    if (episode % config_.trainer.target_update_interval == 0) {
        sync_target(online_, target_);
    }
}

TrainingResult Trainer::result(std::vector<EpisodeMetrics> episodes) const {
    return TrainingResult{online_, target_, std::move(episodes), updates_, epsilon_.value()};
}

CsvWriter open_metrics_csv(const std::filesystem::path& path, std::string_view comment) {
    return CsvWriter(path, comment,
                     {"episode", "step", "sim_time_s", "mean_speed_mps", "live_vehicles", "collisions_cum",
                      "lane_changes_cum", "mean_reward", "mean_r_e", "mean_r_s", "mean_r_c", "mean_r_u",
                      "epsilon", "loss"});
}

std::vector<std::string> metrics_row(const EpisodeMetrics& m) {
    return {format_number(m.episode),  format_number(m.step),      format_number(m.sim_time_s),
            field(m.mean_speed),       format_number(m.live_vehicles), format_number(m.collisions),
            format_number(m.lane_changes), field(m.mean_reward), field(m.mean_r_e),
            field(m.mean_r_s),         field(m.mean_r_c),          field(m.mean_r_u),
            format_number(m.epsilon),  format_number(m.loss)};
}

TrainingResult run_training(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
    config.validate();
    ensure_writable_directory(out_dir);
    const std::string comment = "seed=" + std::to_string(config.sim.seed);

    {
        std::ofstream resolved(out_dir / "config.resolved");
        resolved << "# " << comment << '\n' << serialize_config(config);
        if (!resolved) {
            throw IoError("cannot write " + (out_dir / "config.resolved").string());
        }
    }

    Trainer trainer(config);
    save_checkpoint(trainer.online(), out_dir / "checkpoint_init.lcsq");
    CsvWriter csv = open_metrics_csv(out_dir / "metrics.csv", comment);

    std::vector<EpisodeMetrics> episodes;
    const auto on_row = [&csv](const EpisodeMetrics& m) { csv.row(metrics_row(m)); };
    for (int e = 1; e <= config.trainer.episodes; ++e) {
        EpisodeMetrics m = trainer.run_episode(e, on_row);
        csv.row(metrics_row(m));
        csv.flush();
        trainer.end_of_episode(e);
        const int every = config.trainer.checkpoint_interval;
        if (every > 0 && e % every == 0) {
            char name[40];
            std::snprintf(name, sizeof(name), "checkpoint_ep%04d.lcsq", e);
            save_checkpoint(trainer.online(), out_dir / name);
        }
        episodes.push_back(std::move(m));
    }
    if (config.trainer.episodes > 0) {
        save_checkpoint(trainer.online(), out_dir / "checkpoint_final.lcsq");
    }
    return trainer.result(std::move(episodes));
}

}  // namespace lcstf
