#include "lcstf/nn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

namespace lcstf {

void OptimizerConfig::validate() const {
    if (!(learning_rate >= 0.0)) {
        throw std::invalid_argument("optimizer: learning_rate must be non-negative");
    }
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) || !(epsilon > 0.0)) {
        throw std::invalid_argument("optimizer: require betas in [0, 1) and epsilon > 0");
    }
}

template <class T>
Mlp<T>::Mlp(std::vector<int> layer_sizes) : sizes_(std::move(layer_sizes)) {
    if (sizes_.size() < 2) {
        throw std::invalid_argument("network needs at least an input and an output layer");
    }
    for (int s : sizes_) {
        if (s < 1) {
            throw std::invalid_argument("network layer sizes must be >= 1, got " + std::to_string(s));
        }
    }
    layers_.resize(sizes_.size() - 1);
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        DenseLayer<T>& layer = layers_[l];
        layer.inputs = sizes_[l];
        layer.outputs = sizes_[l + 1];
        layer.weights.assign(static_cast<std::size_t>(layer.inputs) * layer.outputs, T{0});
        layer.biases.assign(static_cast<std::size_t>(layer.outputs), T{0});
    }
}

template <class T>
std::size_t Mlp<T>::parameter_count() const {
    std::size_t n = 0;
    for (const DenseLayer<T>& layer : layers_) {
        n += layer.weights.size() + layer.biases.size();
    }
    return n;
}

namespace {

// y = W x + b with 64-bit accumulation, optionally rectified.
template <class T>
void affine(const DenseLayer<T>& layer, std::span<const T> x, std::vector<T>& y, bool rectify) {
    y.resize(static_cast<std::size_t>(layer.outputs));
    const T* w = layer.weights.data();
    for (int r = 0; r < layer.outputs; ++r) {
        double acc = layer.biases[static_cast<std::size_t>(r)];
        const T* row = w + static_cast<std::size_t>(r) * layer.inputs;
        for (int c = 0; c < layer.inputs; ++c) {
            acc += static_cast<double>(row[c]) * static_cast<double>(x[static_cast<std::size_t>(c)]);
        }
        if (rectify && acc < 0.0) {
            acc = 0.0;
        }
        y[static_cast<std::size_t>(r)] = static_cast<T>(acc);
    }
}

}  // namespace

template <class T>
std::vector<T> Mlp<T>::forward(std::span<const T> input) const {
    if (static_cast<int>(input.size()) != input_size()) {
        throw std::invalid_argument("forward: input length " + std::to_string(input.size()) +
                                    " != network input size " + std::to_string(input_size()));
    }
    std::vector<T> current(input.begin(), input.end());
    std::vector<T> next;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        affine(layers_[l], std::span<const T>(current), next, l + 1 < layers_.size());
        std::swap(current, next);
    }
    return current;
}

template <class T>
void Mlp<T>::forward_cached(std::span<const T> input, std::vector<std::vector<T>>& activations) const {
    if (static_cast<int>(input.size()) != input_size()) {
        throw std::invalid_argument("forward: input length " + std::to_string(input.size()) +
                                    " != network input size " + std::to_string(input_size()));
    }
    activations.resize(layers_.size() + 1);
    activations[0].assign(input.begin(), input.end());
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        affine(layers_[l], std::span<const T>(activations[l]), activations[l + 1],
               l + 1 < layers_.size());
    }
}

template class Mlp<float>;
template class Mlp<double>;

template <class T>
Gradients Gradients::zeros_like(const Mlp<T>& net) {
    Gradients g;
    for (const DenseLayer<T>& layer : net.layers()) {
        g.weights.emplace_back(layer.weights.size(), 0.0);
        g.biases.emplace_back(layer.biases.size(), 0.0);
    }
    return g;
}

template Gradients Gradients::zeros_like(const Mlp<float>&);
template Gradients Gradients::zeros_like(const Mlp<double>&);

double Gradients::max_abs() const {
    double m = 0.0;
    for (const auto& w : weights) {
        for (double x : w) m = std::max(m, std::abs(x));
    }
    for (const auto& b : biases) {
        for (double x : b) m = std::max(m, std::abs(x));
    }
    return m;
}

HuberResult huber_loss_and_grad(double pred, double target) {
    const double e = pred - target;
    if (std::abs(e) <= 1.0) {
        return {0.5 * e * e, e};
    }
    return {std::abs(e) - 0.5, e > 0.0 ? 1.0 : -1.0};
}

template <class T>
double batch_loss(const Mlp<T>& net, std::span<const QSample<T>> batch) {
    double total = 0.0;
    for (const QSample<T>& s : batch) {
        const std::vector<T> q = net.forward(s.input);
        total += huber_loss_and_grad(q.at(static_cast<std::size_t>(s.action)), s.target).loss;
    }
    return batch.empty() ? 0.0 : total / static_cast<double>(batch.size());
}

template double batch_loss(const Mlp<float>&, std::span<const QSample<float>>);
template double batch_loss(const Mlp<double>&, std::span<const QSample<double>>);

template <class T>
double batch_gradients(const Mlp<T>& net, std::span<const QSample<T>> batch, Gradients& grads) {
    grads = Gradients::zeros_like(net);
    if (batch.empty()) {
        return 0.0;
    }
    const auto& layers = net.layers();
    const double scale = 1.0 / static_cast<double>(batch.size());
    std::vector<std::vector<T>> acts;
    std::vector<double> delta;
    std::vector<double> prev_delta;
    double total = 0.0;

    for (const QSample<T>& s : batch) {
        net.forward_cached(s.input, acts);
        const std::vector<T>& q = acts.back();
        const auto action = static_cast<std::size_t>(s.action);
        const HuberResult h = huber_loss_and_grad(q.at(action), s.target);
        total += h.loss;

        delta.assign(q.size(), 0.0);
        delta[action] = h.grad * scale;

        for (std::size_t l = layers.size(); l-- > 0;) {
            const DenseLayer<T>& layer = layers[l];
            const std::vector<T>& x = acts[l];
            std::vector<double>& gw = grads.weights[l];
            std::vector<double>& gb = grads.biases[l];
            prev_delta.assign(static_cast<std::size_t>(layer.inputs), 0.0);
            for (int r = 0; r < layer.outputs; ++r) {
                const double d = delta[static_cast<std::size_t>(r)];
                if (d == 0.0) {
                    continue;
                }
                gb[static_cast<std::size_t>(r)] += d;
                double* grow = gw.data() + static_cast<std::size_t>(r) * layer.inputs;
                const T* wrow = layer.weights.data() + static_cast<std::size_t>(r) * layer.inputs;
                for (int c = 0; c < layer.inputs; ++c) {
                    grow[c] += d * static_cast<double>(x[static_cast<std::size_t>(c)]);
                    prev_delta[static_cast<std::size_t>(c)] += d * static_cast<double>(wrow[c]);
                }
            }
            if (l > 0) {
                // Rectifier derivative: the cached input is the previous layer's post-activation.
                for (std::size_t c = 0; c < prev_delta.size(); ++c) {
                    if (!(x[c] > T{0})) {
                        prev_delta[c] = 0.0;
                    }
                }
            }
            std::swap(delta, prev_delta);
        }
    }
    return total * scale;
}

template double batch_gradients(const Mlp<float>&, std::span<const QSample<float>>, Gradients&);
template double batch_gradients(const Mlp<double>&, std::span<const QSample<double>>, Gradients&);

DenseNet::DenseNet(Mlp<float> mlp)
    : mlp_(std::move(mlp)),
      first_moment_(Gradients::zeros_like(mlp_)),
      second_moment_(Gradients::zeros_like(mlp_)) {}

DenseNet DenseNet::init(const std::vector<int>& layer_sizes, Rng& rng) {
    Mlp<float> mlp(layer_sizes);
    for (DenseLayer<float>& layer : mlp.layers()) {
        const double bound = std::sqrt(6.0 / (layer.inputs + layer.outputs));
        for (float& w : layer.weights) {
            w = static_cast<float>(rng.uniform(-bound, bound));
        }
    }
    return DenseNet(std::move(mlp));
}

void DenseNet::apply_gradients(const Gradients& grads, const OptimizerConfig& opt) {
    ++step_count_;
    const double lr = opt.learning_rate;
    if (opt.kind == OptimizerConfig::Kind::sgd) {
        for (std::size_t l = 0; l < mlp_.layers().size(); ++l) {
            DenseLayer<float>& layer = mlp_.layers()[l];
            for (std::size_t i = 0; i < layer.weights.size(); ++i) {
                layer.weights[i] = static_cast<float>(layer.weights[i] - lr * grads.weights[l][i]);
            }
            for (std::size_t i = 0; i < layer.biases.size(); ++i) {
                layer.biases[i] = static_cast<float>(layer.biases[i] - lr * grads.biases[l][i]);
            }
        }
        return;
    }

    const double t = static_cast<double>(step_count_);
    const double c1 = 1.0 - std::pow(opt.beta1, t);
    const double c2 = 1.0 - std::pow(opt.beta2, t);
    const auto update = [&](float& param, double g, double& m, double& v) {
        m = opt.beta1 * m + (1.0 - opt.beta1) * g;
        v = opt.beta2 * v + (1.0 - opt.beta2) * g * g;
        const double step = lr * (m / c1) / (std::sqrt(v / c2) + opt.epsilon);
        param = static_cast<float>(param - step);
    };
    for (std::size_t l = 0; l < mlp_.layers().size(); ++l) {
        DenseLayer<float>& layer = mlp_.layers()[l];
        for (std::size_t i = 0; i < layer.weights.size(); ++i) {
            update(layer.weights[i], grads.weights[l][i], first_moment_.weights[l][i],
                   second_moment_.weights[l][i]);
        }
        for (std::size_t i = 0; i < layer.biases.size(); ++i) {
            update(layer.biases[i], grads.biases[l][i], first_moment_.biases[l][i],
                   second_moment_.biases[l][i]);
        }
    }
}

void DenseNet::copy_parameters_from(const DenseNet& other) {
    if (other.layer_sizes() != layer_sizes()) {
        throw std::invalid_argument("network architecture mismatch");
    }
    mlp_ = other.mlp_;
}

std::uint64_t DenseNet::parameter_hash() const {
    std::uint64_t h = 1469598103934665603ull;
    const auto mix = [&h](const std::vector<float>& values) {
        for (float f : values) {
            std::uint32_t bits = 0;
            std::memcpy(&bits, &f, sizeof(bits));
            for (int k = 0; k < 4; ++k) {
                h ^= (bits >> (8 * k)) & 0xFFu;
                h *= 1099511628211ull;
            }
        }
    };
    for (const DenseLayer<float>& layer : mlp_.layers()) {
        mix(layer.weights);
        mix(layer.biases);
    }
    return h;
}

double backward_and_apply(DenseNet& net, std::span<const QSample<float>> batch,
                          const OptimizerConfig& opt) {
    if (batch.empty()) {
        throw std::invalid_argument("backward_and_apply: empty minibatch");
    }
    Gradients grads;
    const double loss = batch_gradients(net.mlp(), batch, grads);
    net.apply_gradients(grads, opt);
    return loss;
}

Mlp<double> to_double(const Mlp<float>& net) {
    Mlp<double> out(net.layer_sizes());
    for (std::size_t l = 0; l < net.layers().size(); ++l) {
        const DenseLayer<float>& src = net.layers()[l];
        DenseLayer<double>& dst = out.layers()[l];
        std::copy(src.weights.begin(), src.weights.end(), dst.weights.begin());
        std::copy(src.biases.begin(), src.biases.end(), dst.biases.begin());
    }
    return out;
}

namespace {

// Mean loss plus the branch taken by every ReLU and every Huber term. A
// central difference whose two ends disagree with the base pattern straddles
// a point where the loss is not differentiable.
double loss_and_pattern(const Mlp<double>& net, std::span<const QSample<double>> batch,
                        std::vector<std::uint8_t>& pattern) {
    pattern.clear();
    std::vector<std::vector<double>> acts;
    double total = 0.0;
    for (const QSample<double>& s : batch) {
        net.forward_cached(s.input, acts);
        for (std::size_t l = 1; l + 1 < acts.size(); ++l) {
            for (double a : acts[l]) {
                pattern.push_back(a > 0.0 ? 1 : 0);
            }
        }
        const double e = acts.back().at(static_cast<std::size_t>(s.action)) - s.target;
        pattern.push_back(std::abs(e) <= 1.0 ? 1 : 0);
        total += huber_loss_and_grad(acts.back()[static_cast<std::size_t>(s.action)], s.target).loss;
    }
    return batch.empty() ? 0.0 : total / static_cast<double>(batch.size());
}

}  // namespace

GradCheckResult finite_diff_check(const Mlp<float>& net, std::span<const QSample<float>> batch,
                                  double epsilon, const GradientHook& hook) {
    if (!(epsilon >= 1e-7 && epsilon <= 1e-3)) {
        throw std::invalid_argument("finite_diff_check: epsilon must lie in [1e-7, 1e-3]");
    }
    Mlp<double> shadow = to_double(net);

    std::vector<std::vector<double>> inputs;
    inputs.reserve(batch.size());
    for (const QSample<float>& s : batch) {
        inputs.emplace_back(s.input.begin(), s.input.end());
    }
    std::vector<QSample<double>> samples;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        samples.push_back(QSample<double>{inputs[i], batch[i].action, batch[i].target});
    }
    const std::span<const QSample<double>> view(samples);

    Gradients grads;
    batch_gradients(shadow, view, grads);
    if (hook) {
        hook(grads);
    }

    std::vector<std::uint8_t> base_pattern;
    std::vector<std::uint8_t> plus_pattern;
    std::vector<std::uint8_t> minus_pattern;
    loss_and_pattern(shadow, view, base_pattern);

    GradCheckResult result;
    const auto probe = [&](double& param, double analytic) {
        ++result.total;
        if (std::abs(analytic) <= 1e-8) {
            return;
        }
        const double saved = param;
        param = saved + epsilon;
        const double plus = loss_and_pattern(shadow, view, plus_pattern);
        param = saved - epsilon;
        const double minus = loss_and_pattern(shadow, view, minus_pattern);
        param = saved;
        if (plus_pattern != base_pattern || minus_pattern != base_pattern) {
            ++result.kinks;
            return;
        }
        const double numeric = (plus - minus) / (2.0 * epsilon);
        const double denom = std::max(std::abs(analytic), std::abs(numeric));
        result.max_relative_error = std::max(result.max_relative_error, std::abs(analytic - numeric) / denom);
        ++result.compared;
    };
    for (std::size_t l = 0; l < shadow.layers().size(); ++l) {
        DenseLayer<double>& layer = shadow.layers()[l];
        for (std::size_t i = 0; i < layer.weights.size(); ++i) {
            probe(layer.weights[i], grads.weights[l][i]);
        }
        for (std::size_t i = 0; i < layer.biases.size(); ++i) {
            probe(layer.biases[i], grads.biases[l][i]);
        }
    }
    return result;
}

}  // namespace lcstf
