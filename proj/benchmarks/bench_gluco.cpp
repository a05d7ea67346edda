#include <benchmark/benchmark.h>

#include "gluco/baseline.hpp"
#include "gluco/data.hpp"
#include "gluco/model.hpp"
#include "gluco/ops.hpp"
#include "gluco/rng.hpp"
#include "gluco/synth.hpp"
#include "gluco/tensor.hpp"

using namespace gluco;

namespace {

Tensor random_tensor(Rng& rng, Shape shape) {
    Tensor t(std::move(shape));
    for (std::size_t i = 0; i < t.size(); ++i) t.data()[i] = rng.uniform(-1.0, 1.0);
    return t;
}

void zero_params(const std::vector<NamedParam>& params) {
    for (const NamedParam& p : params) {
        Tensor t = p.tensor;  // shared handle
        t.zero_grad();
    }
}

}  // namespace

static void MatmulForward(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Rng rng(1);
    Tensor a = random_tensor(rng, Shape{n, n});
    Tensor b = random_tensor(rng, Shape{n, n});
    NoGradGuard guard;
    for (auto _ : state) {
        Tensor c = matmul(a, b);
        benchmark::DoNotOptimize(c.data());
    }
    state.SetItemsProcessed(state.iterations() * 2 * static_cast<std::int64_t>(n) * n * n);
}
BENCHMARK(MatmulForward)->RangeMultiplier(4)->Range(16, 256)->Unit(benchmark::kMicrosecond);

static void MatmulBackward(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Rng rng(2);
    Tensor a(Shape{n, n}, random_tensor(rng, Shape{n, n}).values(), true);
    Tensor b(Shape{n, n}, random_tensor(rng, Shape{n, n}).values(), true);
    for (auto _ : state) {
        sum_all(matmul(a, b)).backward();
        a.zero_grad();
        b.zero_grad();
    }
}
BENCHMARK(MatmulBackward)->RangeMultiplier(4)->Range(16, 256)->Unit(benchmark::kMicrosecond);

static void ScaledAttentionForward(benchmark::State& state) {
    const int t = static_cast<int>(state.range(0));
    const int d = 32;
    Rng rng(3);
    Tensor q = random_tensor(rng, Shape{t, d});
    Tensor k = random_tensor(rng, Shape{t, d});
    Tensor v = random_tensor(rng, Shape{t, d});
    NoGradGuard guard;
    for (auto _ : state) {
        Tensor out = scaled_attention(q, k, v);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(ScaledAttentionForward)->Arg(20)->Arg(80)->Arg(160)->Unit(benchmark::kMicrosecond);

static void MultiHeadAttentionForward(benchmark::State& state) {
    const int t = 80, d = 64;
    Rng rng(4);
    Tensor xq = random_tensor(rng, Shape{t, d});
    Tensor xkv = random_tensor(rng, Shape{t, d});
    AttnBlock blk;
    for (int h = 0; h < 4; ++h) {
        blk.heads.push_back(AttnHead{random_tensor(rng, Shape{d, d}),
                                     random_tensor(rng, Shape{d, d}),
                                     random_tensor(rng, Shape{d, d})});
    }
    blk.wh = random_tensor(rng, Shape{4 * d, d});
    NoGradGuard guard;
    for (auto _ : state) {
        Tensor out = multi_head_attention(xq, xkv, blk);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(MultiHeadAttentionForward)->Unit(benchmark::kMicrosecond);

static void AttenGlucoPredict(benchmark::State& state) {
    ModelConfig cfg;
    cfg.t = 80;
    cfg.d_model = 64;
    cfg.heads = 4;
    cfg.horizon = 6;
    cfg.d_ff = 256;
    AttenGluco model(cfg, Rng(5));
    Rng rng(6);
    Tensor g = random_tensor(rng, Shape{80}), ws = random_tensor(rng, Shape{80}),
           wi = random_tensor(rng, Shape{80});
    NoGradGuard guard;
    for (auto _ : state) {
        Tensor out = model.forward(g, ws, wi);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(AttenGlucoPredict)->Unit(benchmark::kMillisecond);

static void AttenGlucoTrainStep(benchmark::State& state) {
    ModelConfig cfg;
    cfg.t = 80;
    cfg.d_model = 64;
    cfg.heads = 4;
    cfg.horizon = 6;
    cfg.d_ff = 256;
    AttenGluco model(cfg, Rng(7));
    Rng rng(8);
    Tensor g = random_tensor(rng, Shape{80}), ws = random_tensor(rng, Shape{80}),
           wi = random_tensor(rng, Shape{80});
    Tensor target = random_tensor(rng, Shape{6});
    for (auto _ : state) {
        mse(model.forward(g, ws, wi), target).backward();
        zero_params(model.params());
    }
}
BENCHMARK(AttenGlucoTrainStep)->Unit(benchmark::kMillisecond);

static void BaselinePredict(benchmark::State& state) {
    CnnLstmBaseline model({80, 6}, Rng(9));
    Rng rng(10);
    Tensor g = random_tensor(rng, Shape{80}), ws = random_tensor(rng, Shape{80}),
           wi = random_tensor(rng, Shape{80});
    NoGradGuard guard;
    for (auto _ : state) {
        Tensor out = model.forward(g, ws, wi);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BaselinePredict)->Unit(benchmark::kMillisecond);

static void BaselineTrainStep(benchmark::State& state) {
    CnnLstmBaseline model({80, 6}, Rng(11));
    Rng rng(12);
    Tensor g = random_tensor(rng, Shape{80}), ws = random_tensor(rng, Shape{80}),
           wi = random_tensor(rng, Shape{80});
    Tensor target = random_tensor(rng, Shape{6});
    for (auto _ : state) {
        mse(model.forward(g, ws, wi), target).backward();
        zero_params(model.params());
    }
}
BENCHMARK(BaselineTrainStep)->Unit(benchmark::kMillisecond);

static void PrepareSubjectPipeline(benchmark::State& state) {
    const auto records = synth_generate(13, 1, 10);
    PipelineOptions opt;
    for (auto _ : state) {
        PreparedSubject s = prepare_subject(records[0], opt);
        benchmark::DoNotOptimize(s.train.data());
    }
}
BENCHMARK(PrepareSubjectPipeline)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
