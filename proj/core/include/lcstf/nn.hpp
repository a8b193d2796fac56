#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lcstf/rng.hpp"

namespace lcstf {

/// Input, hidden and output widths of the default Q-network.
inline const std::vector<int> kDefaultLayerSizes = {40, 32, 64, 64, 512, 5};

struct OptimizerConfig {
    enum class Kind { adam, sgd };
    Kind kind = Kind::adam;
    double learning_rate = 0.00025;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    void validate() const;
    bool operator==(const OptimizerConfig&) const = default;
};

/// Fully connected layer; weights are row-major `outputs x inputs`.
template <class T>
struct DenseLayer {
    int inputs = 0;
    int outputs = 0;
    std::vector<T> weights;
    std::vector<T> biases;

    T& weight(int row, int col) { return weights[static_cast<std::size_t>(row) * inputs + col]; }
    T weight(int row, int col) const { return weights[static_cast<std::size_t>(row) * inputs + col]; }

    bool operator==(const DenseLayer&) const = default;
};

/// Rectified hidden layers, linear output.
template <class T>
class Mlp {
public:
    Mlp() = default;
    /// Zero-initialized network. Throws std::invalid_argument on bad sizes.
    explicit Mlp(std::vector<int> layer_sizes);

    const std::vector<int>& layer_sizes() const { return sizes_; }
    int input_size() const { return sizes_.front(); }
    int output_size() const { return sizes_.back(); }
    std::size_t parameter_count() const;

    std::vector<DenseLayer<T>>& layers() { return layers_; }
    const std::vector<DenseLayer<T>>& layers() const { return layers_; }

    /// Throws std::invalid_argument on an input length mismatch.
    std::vector<T> forward(std::span<const T> input) const;

    /// Forward pass keeping every layer's post-activation output (index 0 is the input).
    void forward_cached(std::span<const T> input, std::vector<std::vector<T>>& activations) const;

    bool operator==(const Mlp&) const = default;

private:
    std::vector<int> sizes_;
    std::vector<DenseLayer<T>> layers_;
};

extern template class Mlp<float>;
extern template class Mlp<double>;

/// Per-layer parameter gradients, always in 64-bit.
struct Gradients {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;

    template <class T>
    static Gradients zeros_like(const Mlp<T>& net);
    double max_abs() const;
};

struct HuberResult {
    double loss = 0.0;
    double grad = 0.0;  ///< d loss / d prediction
};

/// Huber loss with unit threshold on e = pred - target.
HuberResult huber_loss_and_grad(double pred, double target);

/// One regression sample: only the q-entry of `action` carries a residual.
template <class T>
struct QSample {
    std::span<const T> input;
    int action = 0;
    double target = 0.0;
};

/// Mean Huber loss over the batch.
template <class T>
double batch_loss(const Mlp<T>& net, std::span<const QSample<T>> batch);

/// Backpropagation; returns the mean loss, fills batch-averaged gradients.
template <class T>
double batch_gradients(const Mlp<T>& net, std::span<const QSample<T>> batch, Gradients& grads);

/// Q-network with optimizer state and a training-step counter.
class DenseNet {
public:
    DenseNet() = default;
    explicit DenseNet(Mlp<float> mlp);

    /// Glorot-uniform weights, zero biases.
    static DenseNet init(const std::vector<int>& layer_sizes, Rng& rng);

    const Mlp<float>& mlp() const { return mlp_; }
    Mlp<float>& mlp() { return mlp_; }
    const std::vector<int>& layer_sizes() const { return mlp_.layer_sizes(); }
    std::size_t parameter_count() const { return mlp_.parameter_count(); }

    std::vector<float> forward(std::span<const float> input) const { return mlp_.forward(input); }

    std::uint64_t step_count() const { return step_count_; }
    void set_step_count(std::uint64_t n) { step_count_ = n; }

    /// Applies one optimizer update from precomputed gradients.
    void apply_gradients(const Gradients& grads, const OptimizerConfig& opt);

    /// Copies parameters only; optimizer state of `this` is kept.
    void copy_parameters_from(const DenseNet& other);

    /// FNV-1a over the raw parameter bytes.
    std::uint64_t parameter_hash() const;

    bool same_parameters(const DenseNet& other) const { return mlp_ == other.mlp_; }

private:
    Mlp<float> mlp_;
    Gradients first_moment_;
    Gradients second_moment_;
    std::uint64_t step_count_ = 0;
};

/// Backprop on the batch followed by one optimizer step; returns the mean loss.
double backward_and_apply(DenseNet& net, std::span<const QSample<float>> batch,
                          const OptimizerConfig& opt);

Mlp<double> to_double(const Mlp<float>& net);

struct GradCheckResult {
    double max_relative_error = 0.0;
    std::size_t compared = 0;  ///< parameters with |grad| above the skip threshold
    std::size_t kinks = 0;     ///< skipped: the stencil crosses a ReLU or Huber branch change
    std::size_t total = 0;
};

/// Hook that may alter backprop gradients before comparison (fault injection).
using GradientHook = std::function<void(Gradients&)>;

/// Central finite differences against backprop, in a 64-bit copy of `net`.
/// Requires epsilon in [1e-7, 1e-3]. Parameters with |grad| <= 1e-8 and
/// stencils that change any activation branch are not compared.
GradCheckResult finite_diff_check(const Mlp<float>& net, std::span<const QSample<float>> batch,
                                  double epsilon, const GradientHook& hook = {});

/// One row of the standard gradient-check suite.
struct GradCheckCase {
    std::string name;
    std::vector<int> layer_sizes;
    GradCheckResult result;
    double threshold = 0.0;
    bool expect_detection = false;  ///< fault-injected: must exceed the threshold

    bool passed() const {
        return expect_detection ? result.max_relative_error > threshold : result.max_relative_error < threshold;
    }
};

inline constexpr double kGradCheckTolerance = 1e-4;
inline constexpr double kFaultDetectionThreshold = 5e-2;

/// Nets (4,3,5), (10,8,8,5) and the default architecture, plus one
/// fault-injected run on the middle net.
std::vector<GradCheckCase> standard_gradcheck(std::uint64_t seed = 7);

class CheckpointError : public std::runtime_error {
public:
    enum class Kind { io, truncated, format, version, dimension };
    CheckpointError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Little-endian "LCSQ" file: version, layer shapes, weights, biases, step counter.
/// Throws IoError when the file cannot be written.
void save_checkpoint(const DenseNet& net, const std::filesystem::path& path);

DenseNet load_checkpoint(const std::filesystem::path& path);

/// Loads and checks the layer sizes against `expected`.
DenseNet load_checkpoint(const std::filesystem::path& path, const std::vector<int>& expected);

}  // namespace lcstf
