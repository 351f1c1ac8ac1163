#include <benchmark/benchmark.h>

#include "dronechain/state.hpp"
#include "fixtures.hpp"

using namespace dronechain;

namespace {

template <const char* Provider>
void BM_ApplyBlock(benchmark::State& state) {
    auto crypto = make_provider(Provider);
    const auto f = bench::transfer_block(*crypto, static_cast<std::size_t>(state.range(0)));
    const auto base = apply_genesis(f.genesis);
    for (auto _ : state) {
        auto next = apply_block(base, f.block, FeeParams{}, *crypto);
        if (!next) state.SkipWithError("block rejected");
        benchmark::DoNotOptimize(next);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

constexpr char kMock[] = "mock";
constexpr char kEd[] = "ed-curve";
BENCHMARK_TEMPLATE(BM_ApplyBlock, kMock)->RangeMultiplier(4)->Range(1, 256);
BENCHMARK_TEMPLATE(BM_ApplyBlock, kEd)->RangeMultiplier(4)->Range(1, 256);

void BM_StateDigest(benchmark::State& state) {
    auto crypto = make_provider(kMockProvider);
    const auto f = bench::transfer_block(*crypto, static_cast<std::size_t>(state.range(0)));
    const auto s = apply_genesis(f.genesis);
    for (auto _ : state) benchmark::DoNotOptimize(state_digest(s, *crypto));
}
BENCHMARK(BM_StateDigest)->RangeMultiplier(8)->Range(8, 4096);

}  // namespace
