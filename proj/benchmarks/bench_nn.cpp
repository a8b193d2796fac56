#include <benchmark/benchmark.h>

#include "lcstf/nn.hpp"

using namespace lcstf;

namespace {

void BM_Forward(benchmark::State& state) {
    Rng rng(3);
    const DenseNet net = DenseNet::init(kDefaultLayerSizes, rng);
    std::vector<float> x(40);
    for (float& v : x) v = static_cast<float>(rng.uniform(-1, 1));
    for (auto _ : state) benchmark::DoNotOptimize(net.forward(x));
}
BENCHMARK(BM_Forward);

void BM_BackwardAndApply(benchmark::State& state) {
    Rng rng(4);
    DenseNet net = DenseNet::init(kDefaultLayerSizes, rng);
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<std::vector<float>> inputs(n, std::vector<float>(40));
    std::vector<QSample<float>> batch;
    for (std::size_t i = 0; i < n; ++i) {
        for (float& v : inputs[i]) v = static_cast<float>(rng.uniform(-1, 1));
        batch.push_back({inputs[i], static_cast<int>(i % 5), rng.uniform(-2, 2)});
    }
    const OptimizerConfig opt;
    for (auto _ : state) benchmark::DoNotOptimize(backward_and_apply(net, batch, opt));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_BackwardAndApply)->Arg(32);

}  // namespace
