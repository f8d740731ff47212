// Element integration cost: internal force and tangent stiffness of one
// hexahedron for linear/quadratic shape functions and for the composite rule
// a finite cell uses over its subcells.
#include <benchmark/benchmark.h>

#include <vector>

#include "voxfrac/element.hpp"

using namespace voxfrac;

namespace {

struct Setup {
    Box3d box;
    ElementQuadrature quad;
    std::vector<const MaterialParams*> mats;
    std::vector<MaterialState> states;
    Eigen::VectorXd d;

    Setup(int order, bool composite) {
        box.lo = Vec3d::Zero();
        box.hi = Vec3d(4e-3, 4e-3, 4e-3);
        if (composite) {
            std::vector<Box3d> oct;
            const Vec3d mid = 0.5 * (box.lo + box.hi);
            for (int k = 0; k < 8; ++k) {
                Box3d c;
                for (int a = 0; a < 3; ++a) {
                    const bool hi = (k >> a) & 1;
                    c.lo[a] = hi ? mid[a] : box.lo[a];
                    c.hi[a] = hi ? box.hi[a] : mid[a];
                }
                oct.push_back(c);
            }
            quad = composite_quadrature(order + 1, box, oct);
        } else {
            quad = box_quadrature(order + 1, box);
        }
        static const MaterialParams ni = material_preset("Ni");
        mats.assign(quad.size(), &ni);
        states.assign(quad.size(), MaterialState{});
        const int nn = order == 1 ? 8 : 27;
        d = Eigen::VectorXd::Zero(3 * nn);
        for (int a = 0; a < nn; ++a) d(3 * a) = 1e-5 * a;  // bend it a little
    }
};

void bm_element_force_only(benchmark::State& state) {
    const Setup s(static_cast<int>(state.range(0)), false);
    for (auto _ : state)
        benchmark::DoNotOptimize(element_arrays(
            s.box, static_cast<int>(state.range(0)), s.quad, s.mats, s.states,
            s.d, 1e-3, false));
}
BENCHMARK(bm_element_force_only)->Arg(1)->Arg(2);

void bm_element_with_stiffness(benchmark::State& state) {
    const Setup s(static_cast<int>(state.range(0)), false);
    for (auto _ : state)
        benchmark::DoNotOptimize(element_arrays(
            s.box, static_cast<int>(state.range(0)), s.quad, s.mats, s.states,
            s.d, 1e-3, true));
}
BENCHMARK(bm_element_with_stiffness)->Arg(1)->Arg(2);

void bm_composite_cell_with_stiffness(benchmark::State& state) {
    const Setup s(static_cast<int>(state.range(0)), true);
    for (auto _ : state)
        benchmark::DoNotOptimize(element_arrays(
            s.box, static_cast<int>(state.range(0)), s.quad, s.mats, s.states,
            s.d, 1e-3, true));
}
BENCHMARK(bm_composite_cell_with_stiffness)->Arg(1)->Arg(2);

}  // namespace
