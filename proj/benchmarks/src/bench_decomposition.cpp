// Decomposition cost per cell block: run-length optimal, paired merge, and
// the combined octree schemes on an 8x8x8 two-phase block with a curved
// interface (the hard case for box merging).
#include <benchmark/benchmark.h>

#include "voxfrac/decomposition.hpp"

using namespace voxfrac;

namespace {

PhaseBlock curved_block(int n) {
    PhaseBlock b;
    b.extent = {n, n, n};
    b.v.resize(static_cast<std::size_t>(b.volume()));
    const double r2 = 0.36 * n * n;
    std::size_t i = 0;
    for (int z = 0; z < n; ++z)
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x) {
                const double dx = x + 0.5 - 0.5 * n, dy = y + 0.5 - 0.5 * n,
                             dz = z + 0.5 - 0.5 * n;
                b.v[i++] = (dx * dx + dy * dy + dz * dz < r2) ? 1 : 0;
            }
    return b;
}

void bm_run_length_optimal(benchmark::State& state) {
    const PhaseBlock b = curved_block(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(optimal_decompose(b));
}
BENCHMARK(bm_run_length_optimal)->Arg(4)->Arg(8);

void bm_paired_merge(benchmark::State& state) {
    const PhaseBlock b = curved_block(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(mt_decompose(b));
}
BENCHMARK(bm_paired_merge)->Arg(4)->Arg(8);

void bm_octree_with_merge_tail(benchmark::State& state) {
    const PhaseBlock b = curved_block(static_cast<int>(state.range(0)));
    const SchemeTag tag = parse_scheme("T1min1-MT");
    for (auto _ : state)
        benchmark::DoNotOptimize(combined_decompose(b, tag, 0.0));
}
BENCHMARK(bm_octree_with_merge_tail)->Arg(4)->Arg(8);

}  // namespace
