#include <benchmark/benchmark.h>

#include <filesystem>

#include "dronechain/simnet/simulator.hpp"

using namespace dronechain::simnet;

namespace {

void run_shipped(benchmark::State& state, const char* name) {
    const auto path = std::filesystem::path(DC_SOURCE_DIR) / "scenarios" / (std::string(name) + ".json");
    const auto scenario = load_scenario(path);
    for (auto _ : state) benchmark::DoNotOptimize(run_scenario(scenario));
    state.counters["sim_ms"] = static_cast<double>(scenario.duration_ms);
}

BENCHMARK_CAPTURE(run_shipped, happy_path, "happy_path")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(run_shipped, revocation, "revocation")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(run_shipped, partition, "partition")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(run_shipped, validator_crash, "validator_crash")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(run_shipped, lossy_fleet, "lossy_fleet")->Unit(benchmark::kMillisecond);

}  // namespace
