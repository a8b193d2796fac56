#include <algorithm>
#include <cmath>

#include "lcstf/nn.hpp"

namespace lcstf {

namespace {

struct Fixture {
    Mlp<float> net;
    std::vector<std::vector<float>> inputs;
    std::vector<QSample<float>> batch;
};

Fixture make_fixture(const std::vector<int>& sizes, std::size_t batch_size, Rng& rng) {
    Fixture f{DenseNet::init(sizes, rng).mlp(), {}, {}};
    for (DenseLayer<float>& layer : f.net.layers()) {
        for (float& b : layer.biases) {
            b = static_cast<float>(rng.uniform(-0.1, 0.1));
        }
    }
    f.inputs.resize(batch_size);
    for (auto& x : f.inputs) {
        x.resize(static_cast<std::size_t>(sizes.front()));
        for (float& v : x) {
            v = static_cast<float>(rng.uniform(-1.0, 1.0));
        }
    }
    for (const auto& x : f.inputs) {
        const int action = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(sizes.back())));
        f.batch.push_back(QSample<float>{x, action, rng.uniform(-2.0, 2.0)});
    }
    return f;
}

// Inflates the largest output-layer weight gradient by 10%.
void corrupt(Gradients& g) {
    std::vector<double>& w = g.weights.back();
    auto it = std::max_element(w.begin(), w.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    *it *= 1.1;
}

}  // namespace

std::vector<GradCheckCase> standard_gradcheck(std::uint64_t seed) {
    struct CaseDef {
        const char* name;
        std::vector<int> sizes;
        std::size_t batch;
        bool fault;
    };
    const std::vector<CaseDef> cases = {
        {"small", {4, 3, 5}, 8, false},
        {"medium", {10, 8, 8, 5}, 8, false},
        {"default", kDefaultLayerSizes, 4, false},
        {"medium-fault-injected", {10, 8, 8, 5}, 8, true},
    };

    std::vector<GradCheckCase> out;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const CaseDef& s = cases[i];
        Rng rng(derive_seed(seed, s.fault ? 1 : i));
        const Fixture f = make_fixture(s.sizes, s.batch, rng);
        GradCheckCase c;
        c.name = s.name;
        c.layer_sizes = s.sizes;
        c.expect_detection = s.fault;
        c.threshold = s.fault ? kFaultDetectionThreshold : kGradCheckTolerance;
        c.result = finite_diff_check(f.net, f.batch, 1e-4, s.fault ? GradientHook(corrupt) : GradientHook{});
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace lcstf
