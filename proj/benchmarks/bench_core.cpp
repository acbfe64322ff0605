#include <benchmark/benchmark.h>

#include "coarse/embedding.hpp"
#include "coarse/generators.hpp"
#include "coarse/witness.hpp"

using namespace coarse;

static std::shared_ptr<const FiniteSpace> make_space(const char* spec) {
    return std::make_shared<FiniteSpace>(from_graph(gen(GenSpec::parse(spec))));
}

static void BM_apsp_cycle(benchmark::State& state) {
    GenSpec spec = GenSpec::parse("cycle:" + std::to_string(state.range(0)));
    Graph g = gen(spec);
    for (auto _ : state) {
        FiniteSpace s = from_graph(g);
        benchmark::DoNotOptimize(s.diameter());
    }
}
BENCHMARK(BM_apsp_cycle)->Arg(128)->Arg(512);

static void BM_doubling_family(benchmark::State& state) {
    auto sp = make_space("cycle:256");
    std::vector<int> scales = {1, 2, 4, 8, 16, 32, 64};
    for (auto _ : state) {
        WitnessFamily f = doubling_family(sp, 2.0, scales);
        benchmark::DoNotOptimize(f.psi.size());
    }
}
BENCHMARK(BM_doubling_family);

static void BM_pairwise_profiles(benchmark::State& state) {
    auto sp = make_space("cycle:128");
    std::vector<int> scales = {1, 2, 4, 8, 16, 32};
    NormalizeResult norm = normalize(doubling_family(sp, 2.0, scales));
    Embedding e =
        build_uniform_embedding(norm.family, norm.profile, RateFunction{0.5, 0.0}, 0, 5);
    for (auto _ : state) {
        EmbeddingProfiles prof = embedding_profiles(e);
        benchmark::DoNotOptimize(prof.fit_a);
    }
}
BENCHMARK(BM_pairwise_profiles);

BENCHMARK_MAIN();
