#include <benchmark/benchmark.h>

#include <algorithm>
#include <cmath>

#include "pure/harness.hpp"
#include "pure/isotropy.hpp"
#include "pure/linalg.hpp"
#include "pure/purify.hpp"
#include "pure/rsvd.hpp"

namespace {

using namespace pure;

// Token-sized matrix with a dominant direction: n tokens of dimension d.
Matrix tokens(std::size_t n, std::size_t d)
{
    SynthConfig cfg;
    cfg.n_instances = 1;
    cfg.tokens_per_instance = n;
    cfg.dim = d;
    cfg.seed = RngSeed{11};
    return synth_batch(cfg).tokens;
}

void BM_ExactSvd(benchmark::State& state)
{
    const Matrix x = tokens(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
    for (auto _ : state)
        benchmark::DoNotOptimize(exact_svd(x));
}
BENCHMARK(BM_ExactSvd)->Args({32, 64})->Args({64, 128})->Args({128, 256})->Unit(benchmark::kMicrosecond);

// Reports the relative error of sigma_1 against the exact decomposition.
void BM_Rsvd(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto d = static_cast<std::size_t>(state.range(1));
    const Matrix x = tokens(n, d);
    RsvdConfig cfg;
    cfg.sketch_width = std::min<std::size_t>(static_cast<std::size_t>(state.range(2)), std::min(n, d));
    cfg.power_iters = 2;
    cfg.target_rank = 1;
    cfg.seed = RngSeed{42};
    SvdResult out;
    for (auto _ : state) {
        out = rsvd(x, cfg);
        benchmark::DoNotOptimize(out);
    }
    const double exact = exact_svd(x).sigma[0];
    state.counters["sigma1_rel_err"] = std::abs(out.sigma[0] - exact) / exact;
}
BENCHMARK(BM_Rsvd)
    ->ArgsProduct({{32, 64, 128}, {128, 256}, {8, 16, 32}})
    ->Unit(benchmark::kMicrosecond);

void BM_PurifyInstance(benchmark::State& state)
{
    const Matrix x = tokens(static_cast<std::size_t>(state.range(0)), 256);
    PurifyConfig cfg;
    cfg.backend = state.range(1) == 0 ? Backend::Exact : Backend::Randomized;
    for (auto _ : state)
        benchmark::DoNotOptimize(purify_instance(x, cfg));
}
BENCHMARK(BM_PurifyInstance)->ArgsProduct({{16, 64}, {0, 1}})->Unit(benchmark::kMicrosecond);

void BM_PfsaPool(benchmark::State& state)
{
    const Matrix x = tokens(static_cast<std::size_t>(state.range(0)), 256);
    for (auto _ : state)
        benchmark::DoNotOptimize(pfsa_pool(x, 1.5));
}
BENCHMARK(BM_PfsaPool)->Arg(16)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_PurifyBatch(benchmark::State& state)
{
    SynthConfig scfg;
    scfg.n_instances = 256;
    scfg.tokens_per_instance = 32;
    scfg.dim = 128;
    const auto batch = synth_batch(scfg);
    const PurifyConfig cfg;
    for (auto _ : state)
        benchmark::DoNotOptimize(purify_batch(batch, cfg, static_cast<unsigned>(state.range(0))));
}
BENCHMARK(BM_PurifyBatch)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_AnisotropyBaseline(benchmark::State& state)
{
    const auto corpus = synth_shared_direction_corpus(100, 16, 128, 0.5, RngSeed{1});
    for (auto _ : state)
        benchmark::DoNotOptimize(anisotropy_baseline(corpus, static_cast<std::size_t>(state.range(0)), RngSeed{2}));
}
BENCHMARK(BM_AnisotropyBaseline)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
