#include <benchmark/benchmark.h>

#include "sqlgen/gatenet/model.hpp"
#include "sqlgen/random.hpp"

namespace {

using namespace sqlgen;
using namespace sqlgen::gatenet;

struct Setup {
    GateModel model;
    std::vector<int> src, tgt;
};

Setup make(std::size_t d) {
    GateConfig cfg;
    cfg.d_model = d;
    cfg.vocab_size = 80;
    cfg.max_src_len = 24;
    cfg.max_tgt_len = 10;
    cfg.seed = 3;
    Rng rng(4);
    std::vector<int> src(24), tgt(10);
    for (int& t : src) t = static_cast<int>(rng.below(80));
    for (int& t : tgt) t = static_cast<int>(rng.below(80));
    return {GateModel(cfg), src, tgt};
}

void BM_Forward(benchmark::State& state) {
    const auto s = make(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto r = s.model.forward(s.src, s.tgt);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_Forward)->Arg(16)->Arg(32);

void BM_LossAndGradient(benchmark::State& state) {
    const auto s = make(static_cast<std::size_t>(state.range(0)));
    ModelParams grads = zero_params(s.model.config());
    for (auto _ : state) {
        benchmark::DoNotOptimize(s.model.loss_and_gradient(s.src, s.tgt, grads));
    }
}
BENCHMARK(BM_LossAndGradient)->Arg(16)->Arg(32);

}  // namespace
