#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lcstf/csv.hpp"
#include "lcstf/env.hpp"
#include "lcstf/errors.hpp"
#include "lcstf/nn.hpp"
#include "lcstf/rng.hpp"

namespace lcstf {

struct Transition {
    Observation observation;
    int action = 0;
    float reward = 0.0f;
    Observation next_observation;
    bool terminal = false;
};

/// Non-owning view of a stored transition.
struct TransitionView {
    std::span<const float> observation;
    int action = 0;
    float reward = 0.0f;
    std::span<const float> next_observation;
    bool terminal = false;
};

/// Fixed-capacity FIFO replay memory with contiguous observation storage.
class ReplayBuffer {
public:
    ReplayBuffer(std::size_t capacity, int observation_size);

    /// Throws std::invalid_argument on a length mismatch, a bad action, or a non-finite reward.
    void push(std::span<const float> observation, int action, float reward,
              std::span<const float> next_observation, bool terminal);
    void push(const Transition& t) {
        push(t.observation, t.action, t.reward, t.next_observation, t.terminal);
    }

    std::size_t size() const { return size_; }
    std::size_t capacity() const { return capacity_; }
    std::uint64_t inserted() const { return inserted_; }
    int observation_size() const { return dim_; }

    /// i = 0 is the oldest retained transition.
    TransitionView at(std::size_t i) const;

    /// Uniform with replacement.
    std::vector<std::size_t> sample_indices(std::size_t n, Rng& rng) const;

private:
    std::size_t slot(std::size_t i) const { return (head_ + i) % capacity_; }

    std::size_t capacity_;
    int dim_;
    std::vector<float> observations_;
    std::vector<float> next_observations_;
    std::vector<int> actions_;
    std::vector<float> rewards_;
    std::vector<std::uint8_t> terminals_;
    std::size_t head_ = 0;  ///< slot of the oldest transition once full
    std::size_t size_ = 0;
    std::uint64_t inserted_ = 0;
};

struct TrainerConfig {
    int episodes = 500;
    double gamma = 0.99;
    int minibatch = 32;
    double eps_start = 1.0;
    double eps_end = 0.1;
    double eps_decay = 0.99985;
    std::size_t learning_start = 5000;
    int train_interval = 10;           ///< sim steps between gradient updates
    int target_update_interval = 10;   ///< episodes between target syncs
    std::size_t buffer_capacity = 400000;
    std::vector<int> hidden_layers = {32, 64, 64, 512};
    OptimizerConfig optimizer;
    int checkpoint_interval = 50;  ///< episodes; 0 disables periodic checkpoints
    int log_interval = 0;          ///< steps between intra-episode metric rows; 0 = episode end only

    void validate() const;
    /// Input, hidden and output widths for an observation of `observation_size`.
    std::vector<int> layer_sizes(int observation_size) const;

    bool operator==(const TrainerConfig&) const = default;
};

/// Everything one experiment needs; the master seed is `sim.seed`.
struct ExperimentConfig {
    SimConfig sim;
    ObservationParams normalization;
    RewardParams reward;
    TrainerConfig trainer;

    void validate() const;
    bool operator==(const ExperimentConfig&) const = default;
};

/// eps <- max(eps_end, eps * eps_decay), once per gradient update.
class EpsilonSchedule {
public:
    EpsilonSchedule(double start, double end, double decay)
        : value_(start), end_(end), decay_(decay) {}
    explicit EpsilonSchedule(const TrainerConfig& c) : EpsilonSchedule(c.eps_start, c.eps_end, c.eps_decay) {}

    double value() const { return value_; }
    std::uint64_t decays() const { return decays_; }
    void decay();

private:
    double value_;
    double end_;
    double decay_;
    std::uint64_t decays_ = 0;
};

/// Greedy index of `q`; ties go to the lowest index.
int argmax(std::span<const float> q);

/// Epsilon-greedy: one uniform draw decides exploration, a second picks the random action.
int select_action(const DenseNet& net, std::span<const float> observation, double epsilon, Rng& rng);

/// y = r for terminal transitions, r + gamma * max_a' Q_target(s', a') otherwise.
std::vector<double> td_targets(std::span<const TransitionView> batch, const DenseNet& target_net,
                               double gamma);

/// Hard copy of the online parameters. Throws std::invalid_argument on an architecture mismatch.
void sync_target(const DenseNet& online, DenseNet& target);

/// One gradient update, or nullopt while the buffer holds fewer than learning_start transitions.
std::optional<double> train_step(const ReplayBuffer& buffer, DenseNet& online, const DenseNet& target,
                                 const TrainerConfig& config, EpsilonSchedule& epsilon, Rng& rng);

struct EpisodeMetrics {
    int episode = 0;  ///< 1-based
    int step = 0;     ///< steps simulated so far in the episode
    double sim_time_s = 0.0;
    double mean_speed = 0.0;  ///< mean over steps of the evaluation-zone mean speed
    int live_vehicles = 0;
    std::int64_t collisions = 0;    ///< collision events, all vehicles
    std::int64_t lane_changes = 0;  ///< completed lane changes, all vehicles
    std::int64_t agent_collisions = 0;    ///< events with at least one agent involved
    std::int64_t agent_lane_changes = 0;  ///< completed agent lane changes
    std::int64_t agent_steps = 0;
    double mean_reward = 0.0;
    double mean_r_e = 0.0;
    double mean_r_s = 0.0;
    double mean_r_c = 0.0;
    double mean_r_u = 0.0;
    double mean_agent_speed = 0.0;
    double epsilon = 0.0;
    std::optional<double> loss;  ///< mean over the episode's updates
};

/// True when either vehicle of `c` is an agent; looks the ids up in `events.removed`.
bool collision_involves_agent(const StepEvents& events, const CollisionEvent& c);

/// Running sums behind EpisodeMetrics.
class EpisodeAccumulator {
public:
    void add_step(const EnvStep& step, const SimState& state_after);
    void add_loss(double loss);

    /// Metrics so far; averages with no samples are NaN, loss is absent without updates.
    EpisodeMetrics snapshot(int episode, const SimState& state, double dt, double epsilon) const;

    std::int64_t steps() const { return steps_; }

private:
    std::int64_t steps_ = 0;
    double speed_sum_ = 0.0;
    std::int64_t speed_samples_ = 0;
    std::int64_t agent_collisions_ = 0;
    std::int64_t agent_steps_ = 0;
    double reward_sum_ = 0.0;
    double r_e_sum_ = 0.0;
    double r_s_sum_ = 0.0;
    double r_c_sum_ = 0.0;
    double r_u_sum_ = 0.0;
    double agent_speed_sum_ = 0.0;
    double loss_sum_ = 0.0;
    std::int64_t loss_count_ = 0;
};

struct TrainingResult {
    DenseNet online;
    DenseNet target;
    std::vector<EpisodeMetrics> episodes;
    std::uint64_t gradient_updates = 0;
    double final_epsilon = 1.0;
};

/// Shared-parameter multi-agent DQN over TrafficEnv.
class Trainer {
public:
    explicit Trainer(ExperimentConfig config);

    const ExperimentConfig& config() const { return config_; }
    const DenseNet& online() const { return online_; }
    const DenseNet& target() const { return target_; }
    const ReplayBuffer& buffer() const { return buffer_; }
    const EpsilonSchedule& epsilon() const { return epsilon_; }
    std::uint64_t gradient_updates() const { return updates_; }

    /// Runs one episode; `on_row` sees intra-episode rows when log_interval > 0.
    EpisodeMetrics run_episode(int episode,
                               const std::function<void(const EpisodeMetrics&)>& on_row = {});

    /// Target sync bookkeeping after an episode (1-based index).
    void end_of_episode(int episode);

    TrainingResult result(std::vector<EpisodeMetrics> episodes) const;

private:
    ExperimentConfig config_;
    TrafficEnv env_;
    DenseNet online_;
    DenseNet target_;
    ReplayBuffer buffer_;
    EpsilonSchedule epsilon_;
    Rng rng_;
    std::uint64_t updates_ = 0;
    std::uint64_t global_step_ = 0;
};

/// metrics.csv layout, shared by training and evaluation time series.
CsvWriter open_metrics_csv(const std::filesystem::path& path, std::string_view comment);
std::vector<std::string> metrics_row(const EpisodeMetrics& m);

/// Seed of episode `episode` (1-based) derived from the master seed.
std::uint64_t episode_seed(std::uint64_t master, int episode);

/// Full training run writing metrics.csv and checkpoints under `out_dir`.
/// Throws IoError before training when `out_dir` is not writable.
TrainingResult run_training(const ExperimentConfig& config, const std::filesystem::path& out_dir);

}  // namespace lcstf
