#include <benchmark/benchmark.h>

#include "pzbeam/diagnostics.hpp"
#include "pzbeam/gains.hpp"
#include "pzbeam/integrator.hpp"
#include "pzbeam/spectral.hpp"

using namespace pzbeam;

namespace {

MaterialParams reference_material() {
    return validate_material(MaterialInput{1.0, 0.1, 1.0, 3.0, 0.01, 1.0});
}

GainSet reference_gains() {
    GainSet g;
    g.k1 = 1e-7;
    g.k2 = 1e-8;
    g.k3 = 1e-7;
    g.k4 = 3e-6;
    g.k5 = 60.0;
    g.k6 = 2e-2;
    g.k7 = 10.0;
    g.k8 = 4e-2;
    return g;
}

void BM_Assemble(benchmark::State& state) {
    const MaterialParams mat = reference_material();
    const Grid grid = build_grid(1.0, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(assemble(mat, reference_gains(), grid));
    }
}
BENCHMARK(BM_Assemble)->Arg(30)->Arg(61)->Arg(123);

void BM_Step(benchmark::State& state) {
    const MaterialParams mat = reference_material();
    const SemiDiscreteSystem sys =
        assemble(mat, reference_gains(), build_grid(1.0, static_cast<int>(state.range(0))));
    InitialConditions ic;
    ic.mismatch_scale = 0.5;
    SimState s = make_initial_state(sys, ic);
    const Stepper stepper(sys, sys.grid.h / 10.0);
    for (auto _ : state) {
        s = stepper.step(s);
        benchmark::DoNotOptimize(s.u.data());
    }
}
BENCHMARK(BM_Step)->Arg(30)->Arg(61)->Arg(123);

void BM_ReferenceRun(benchmark::State& state) {
    const MaterialParams mat = reference_material();
    const SemiDiscreteSystem sys = assemble(mat, reference_gains(), build_grid(1.0, 30));
    InitialConditions ic;
    ic.mismatch_scale = 0.5;
    StepperConfig cfg;
    cfg.dt = sys.grid.h / 10.0;
    cfg.T = 5.0;
    cfg.snapshot_stride = 10;
    for (auto _ : state) {
        const auto snaps = simulate(sys, make_initial_state(sys, ic), cfg);
        benchmark::DoNotOptimize(discrete_energy(sys, snaps.back()).E_total);
    }
}
BENCHMARK(BM_ReferenceRun)->Unit(benchmark::kMillisecond);

void BM_SpectralAbscissa(benchmark::State& state) {
    const MaterialParams mat = reference_material();
    const SemiDiscreteSystem sys =
        assemble(mat, reference_gains(), build_grid(1.0, static_cast<int>(state.range(0))));
    for (auto _ : state) {
        benchmark::DoNotOptimize(spectral_abscissa(sys).abscissa);
    }
}
BENCHMARK(BM_SpectralAbscissa)->Arg(10)->Arg(20)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_CertificateSearch(benchmark::State& state) {
    const MaterialParams mat = reference_material();
    const GainSet g = reference_gains();
    for (auto _ : state) {
        benchmark::DoNotOptimize(search_certificate(mat, g, state.range(0)).constants.omega);
    }
}
BENCHMARK(BM_CertificateSearch)->Arg(3136)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
