// Nonlocal bookkeeping cost: building the hashed neighborhood model for a
// whole mesh and querying one candidate's neighborhood and area increment.
#include <benchmark/benchmark.h>

#include "voxfrac/erosion.hpp"

using namespace voxfrac;

namespace {

FcmMesh sphere_mesh(int n, int cells_axis) {
    VoxelGrid g = generate_sphere_specimen(n, static_cast<double>(n),
                                           0.625 * n, 0.125 * n, {0, 1, 2});
    const CellGrid cells = make_cell_grid(g, {cells_axis, cells_axis, cells_axis});
    const SubcellLayout layout =
        decompose_grid(g, cells, parse_scheme("T1min1-MT"));
    return build_mesh(g, layout,
                      {material_preset("Ni"), material_preset("eta-carbide"),
                       material_preset("WC")},
                      1, 1);
}

void bm_neighborhood_build(benchmark::State& state) {
    FcmMesh mesh = sphere_mesh(static_cast<int>(state.range(0)), 2);
    for (auto _ : state)
        benchmark::DoNotOptimize(ErosionModel(mesh, {0.5, 1e-3}));
}
BENCHMARK(bm_neighborhood_build)->Arg(8)->Arg(16);

void bm_neighborhood_query(benchmark::State& state) {
    FcmMesh mesh = sphere_mesh(static_cast<int>(state.range(0)), 2);
    const ErosionModel model(mesh, {0.5, 1e-3});
    const int mid = model.n_gids() / 2;
    for (auto _ : state) benchmark::DoNotOptimize(model.neighborhood(mid));
}
BENCHMARK(bm_neighborhood_query)->Arg(8)->Arg(16);

void bm_area_increment(benchmark::State& state) {
    FcmMesh mesh = sphere_mesh(static_cast<int>(state.range(0)), 2);
    const ErosionModel model(mesh, {0.5, 1e-3});
    const int mid = model.n_gids() / 2;
    for (auto _ : state) benchmark::DoNotOptimize(model.delta_area(mid));
}
BENCHMARK(bm_area_increment)->Arg(8)->Arg(16);

}  // namespace
