#include <benchmark/benchmark.h>

#include <random>

#include "g2tr/costmodel.hpp"
#include "g2tr/io/feature_dump.hpp"
#include "g2tr/pipeline.hpp"

namespace {

std::vector<float> normals(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<float> dist;
    std::vector<float> v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

// side x side tokens of width dim, latents at twice the resolution
g2tr::ReductionInputs make_inputs(std::size_t side, std::size_t dim) {
    std::mt19937_64 rng(side * 131 + dim);
    g2tr::ReductionInputs in;
    in.tokens = g2tr::TokenGrid(side, side, dim, normals(rng, side * side * dim));
    in.latents = g2tr::LatentGrid(2 * side, 2 * side, 16, normals(rng, 4 * side * side * 16));
    in.projection = g2tr::ProjectionMatrix(16, dim, normals(rng, 16 * dim));
    return in;
}

void BM_Reduce(benchmark::State& state) {
    const auto in = make_inputs(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
    g2tr::ReductionConfig config;
    for (auto _ : state) benchmark::DoNotOptimize(g2tr::reduce(in, config));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(in.tokens.size()));
}
BENCHMARK(BM_Reduce)->Args({16, 64})->Args({32, 256})->Args({48, 1024})->Unit(benchmark::kMillisecond);

void BM_Select(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist;
    g2tr::ScoreVector scores(side * side);
    for (auto& s : scores) s = dist(rng);
    const auto budget = g2tr::compute_budget(0.5, scores.size(), 1);
    for (auto _ : state) {
        const auto best = g2tr::per_anchor_best(scores, {side, side}, {side / 2, side / 2});
        benchmark::DoNotOptimize(g2tr::balanced_select(scores, best, budget));
    }
}
BENCHMARK(BM_Select)->Arg(16)->Arg(64)->Arg(128);

void BM_DumpRoundTrip(benchmark::State& state) {
    const auto in = make_inputs(32, 256);
    for (auto _ : state) benchmark::DoNotOptimize(g2tr::io::decode_dump(g2tr::io::encode_dump(in)));
}
BENCHMARK(BM_DumpRoundTrip);

void BM_CostCompare(benchmark::State& state) {
    const auto spec = g2tr::reference_model_spec();
    for (auto _ : state) benchmark::DoNotOptimize(g2tr::compare(spec, 256, 4608, 2304));
}
BENCHMARK(BM_CostCompare);

}  // namespace

BENCHMARK_MAIN();
