#include <benchmark/benchmark.h>

// The distro's benchmark_main archive carries LTO bytecode, so provide main here.
BENCHMARK_MAIN();
