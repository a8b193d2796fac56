#include "lcstf/madqn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lcstf {

ReplayBuffer::ReplayBuffer(std::size_t capacity, int observation_size)
    : capacity_(capacity), dim_(observation_size) {
    if (capacity == 0 || observation_size <= 0) {
        throw std::invalid_argument("replay buffer: capacity and observation size must be positive");
    }
}

void ReplayBuffer::push(std::span<const float> observation, int action, float reward,
                        std::span<const float> next_observation, bool terminal) {
    const auto dim = static_cast<std::size_t>(dim_);
    if (observation.size() != dim || next_observation.size() != dim) {
        throw std::invalid_argument("replay buffer: observation length " +
                                    std::to_string(observation.size()) + "/" +
                                    std::to_string(next_observation.size()) + " != " +
                                    std::to_string(dim_));
    }
    if (action < 0 || action >= kActionCount) {
        throw std::invalid_argument("replay buffer: action index out of range");
    }
    if (!std::isfinite(reward)) {
        throw std::invalid_argument("replay buffer: non-finite reward");
    }

    if (size_ < capacity_) {
        observations_.insert(observations_.end(), observation.begin(), observation.end());
        next_observations_.insert(next_observations_.end(), next_observation.begin(),
                                  next_observation.end());
        actions_.push_back(action);
        rewards_.push_back(reward);
        terminals_.push_back(terminal ? 1 : 0);
        ++size_;
    } else {
        const std::size_t s = head_;
        std::copy(observation.begin(), observation.end(), observations_.begin() + static_cast<std::ptrdiff_t>(s * dim));
        std::copy(next_observation.begin(), next_observation.end(),
                  next_observations_.begin() + static_cast<std::ptrdiff_t>(s * dim));
        actions_[s] = action;
        rewards_[s] = reward;
        terminals_[s] = terminal ? 1 : 0;
        head_ = (head_ + 1) % capacity_;
    }
    ++inserted_;
}

TransitionView ReplayBuffer::at(std::size_t i) const {
    if (i >= size_) {
        throw std::out_of_range("replay buffer index " + std::to_string(i) + " >= size " +
                                std::to_string(size_));
    }
    const std::size_t s = slot(i);
    const auto dim = static_cast<std::size_t>(dim_);
    return TransitionView{std::span<const float>(observations_.data() + s * dim, dim), actions_[s],
                          rewards_[s], std::span<const float>(next_observations_.data() + s * dim, dim),
                          terminals_[s] != 0};
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t n, Rng& rng) const {
    if (size_ == 0) {
        throw std::logic_error("replay buffer: sampling from an empty buffer");
    }
    std::vector<std::size_t> idx(n);
    for (std::size_t& i : idx) {
        i = static_cast<std::size_t>(rng.uniform_index(size_));
    }
    return idx;
}

void TrainerConfig::validate() const {
    if (episodes < 0) {
        throw std::invalid_argument("trainer: episodes must be non-negative");
    }
    if (!(gamma > 0.0 && gamma <= 1.0)) {
        throw std::invalid_argument("trainer: gamma must lie in (0, 1]");
    }
    if (minibatch <= 0 || static_cast<std::size_t>(minibatch) > learning_start) {
        throw std::invalid_argument("trainer: require 0 < minibatch <= learning_start");
    }
    if (!(eps_end >= 0.0 && eps_end <= eps_start && eps_start <= 1.0) ||
        !(eps_decay > 0.0 && eps_decay <= 1.0)) {
        throw std::invalid_argument("trainer: require 0 <= eps_end <= eps_start <= 1, eps_decay in (0, 1]");
    }
    if (train_interval <= 0 || target_update_interval <= 0 || buffer_capacity == 0) {
        throw std::invalid_argument("trainer: intervals and buffer capacity must be positive");
    }
    if (checkpoint_interval < 0 || log_interval < 0) {
        throw std::invalid_argument("trainer: checkpoint and log intervals must be non-negative");
    }
    if (hidden_layers.empty() ||
        std::any_of(hidden_layers.begin(), hidden_layers.end(), [](int h) { return h < 1; })) {
        throw std::invalid_argument("trainer: need at least one hidden layer, all sizes >= 1");
    }
    optimizer.validate();
}

std::vector<int> TrainerConfig::layer_sizes(int observation_size) const {
    std::vector<int> sizes;
    sizes.push_back(observation_size);
    sizes.insert(sizes.end(), hidden_layers.begin(), hidden_layers.end());
    sizes.push_back(kActionCount);
    return sizes;
}

void ExperimentConfig::validate() const {
    sim.validate();
    trainer.validate();
    const ObservationParams& n = normalization;
    if (!(n.v_cap > 0) || !(n.density_scale > 0) || !(n.lat_speed_scale > 0) || !(n.lane_count_scale > 0)) {
        throw std::invalid_argument("normalization: all scales must be positive");
    }
    if (!(reward.t_min_gap > 0) || !(reward.t_lat > 0) || !(reward.jerk_max > 0)) {
        throw std::invalid_argument("reward: thresholds and jerk_max must be positive");
    }
}

void EpsilonSchedule::decay() {
    value_ = std::max(end_, value_ * decay_);
    ++decays_;
}

int argmax(std::span<const float> q) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(q.size()); ++i) {
        if (q[static_cast<std::size_t>(i)] > q[static_cast<std::size_t>(best)]) {
            best = i;
        }
    }
    return best;
}

int select_action(const DenseNet& net, std::span<const float> observation, double epsilon, Rng& rng) {
    if (rng.uniform01() < epsilon) {
        return static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(net.layer_sizes().back())));
    }
    const std::vector<float> q = net.forward(observation);
    return argmax(q);
}

std::vector<double> td_targets(std::span<const TransitionView> batch, const DenseNet& target_net,
                               double gamma) {
    std::vector<double> y;
    y.reserve(batch.size());
    for (const TransitionView& t : batch) {
        if (t.terminal) {
            y.push_back(t.reward);
            continue;
        }
        const std::vector<float> q = target_net.forward(t.next_observation);
        const float best = *std::max_element(q.begin(), q.end());
        y.push_back(static_cast<double>(t.reward) + gamma * static_cast<double>(best));
    }
    return y;
}

void sync_target(const DenseNet& online, DenseNet& target) {
    if (online.layer_sizes() != target.layer_sizes()) {
        throw std::invalid_argument("sync_target: online and target architectures differ");
    }
    target.copy_parameters_from(online);
}

std::optional<double> train_step(const ReplayBuffer& buffer, DenseNet& online, const DenseNet& target,
                                 const TrainerConfig& config, EpsilonSchedule& epsilon, Rng& rng) {
    if (buffer.size() < config.learning_start) {
        return std::nullopt;
    }
    const auto indices = buffer.sample_indices(static_cast<std::size_t>(config.minibatch), rng);
    std::vector<TransitionView> batch;
    batch.reserve(indices.size());
    for (std::size_t i : indices) {
        batch.push_back(buffer.at(i));
    }
    const std::vector<double> y = td_targets(batch, target, config.gamma);
    std::vector<QSample<float>> samples;
    samples.reserve(batch.size());
    for (std::size_t k = 0; k < batch.size(); ++k) {
        samples.push_back(QSample<float>{batch[k].observation, batch[k].action, y[k]});
    }
    const double loss = backward_and_apply(online, samples, config.optimizer);
    epsilon.decay();
    return loss;
}

}  // namespace lcstf
