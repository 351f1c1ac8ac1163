#include <benchmark/benchmark.h>

// The packaged benchmark_main archive carries LTO bytecode from a different
// compiler release, so the entry point lives here.
BENCHMARK_MAIN();
