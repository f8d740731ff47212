// Single-point stress update cost: elastic, rate-independent plastic, and
// viscoplastic branches, plus the finite-strain wrapper with its spectral
// decomposition and tangent transform.
#include <benchmark/benchmark.h>

#include "voxfrac/material.hpp"

using namespace voxfrac;

namespace {

Mat3 overyield_strain() {
    Mat3 eps = Mat3::Zero();
    eps(0, 0) = 6e-3;
    eps(1, 1) = -2e-3;
    eps(0, 1) = eps(1, 0) = 1e-3;
    return eps;
}

void bm_update_elastic(benchmark::State& state) {
    const MaterialParams p = material_preset("WC");
    const Mat3 eps = overyield_strain();
    const MaterialState st;
    for (auto _ : state)
        benchmark::DoNotOptimize(update_stress(p, eps, st, 1e-3));
}
BENCHMARK(bm_update_elastic);

void bm_update_plastic(benchmark::State& state) {
    const MaterialParams p = material_preset("Ni");
    const Mat3 eps = overyield_strain();
    const MaterialState st;
    for (auto _ : state)
        benchmark::DoNotOptimize(update_stress(p, eps, st, 1e-3));
}
BENCHMARK(bm_update_plastic);

void bm_update_viscoplastic(benchmark::State& state) {
    const MaterialParams p = material_preset("NiBSi");
    const Mat3 eps = overyield_strain();
    const MaterialState st;
    for (auto _ : state)
        benchmark::DoNotOptimize(update_stress(p, eps, st, 1e-3));
}
BENCHMARK(bm_update_viscoplastic);

void bm_finite_strain_evaluation(benchmark::State& state) {
    const MaterialParams p = material_preset("Ni");
    Mat3 f = Mat3::Identity();
    f(0, 0) += 8e-3;
    f(0, 1) += 3e-3;
    const MaterialState st;
    for (auto _ : state)
        benchmark::DoNotOptimize(evaluate_material(p, f, st, 1e-3));
}
BENCHMARK(bm_finite_strain_evaluation);

}  // namespace
