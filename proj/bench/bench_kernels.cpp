// Serial reference vs OpenMP version of the ensemble and assembly kernels.
// Both produce identical output (see the unit tests); this only measures time.

#include <benchmark/benchmark.h>

#include "rcd/hyperbolic.hpp"
#include "rcd/lyapunov.hpp"
#include "rcd/measure.hpp"

using namespace rcd;

namespace {

GeneratorSystem symmetric_proximal()
{
    auto g = MoebiusMap::diagonal(2.0);
    auto h = compose(compose(MoebiusMap::rotation(0.29), g), MoebiusMap::rotation(-0.29));
    return {{g, invert(g), h, invert(h)}, ConstantWeights{{0.25, 0.25, 0.25, 0.25}}};
}

Execution mode(benchmark::State const& s)
{
    return s.range(0) == 0 ? Execution::serial : Execution::parallel;
}

void label(benchmark::State& s)
{
    s.SetLabel(s.range(0) == 0 ? "serial" : "parallel");
}

void BM_ulam_assembly(benchmark::State& state)
{
    auto sys = symmetric_proximal();
    for (auto _ : state)
        benchmark::DoNotOptimize(assemble_diffusion(sys, static_cast<std::size_t>(state.range(1)), mode(state)));
    label(state);
}
BENCHMARK(BM_ulam_assembly)->ArgsProduct({{0, 1}, {512, 2048}})->Unit(benchmark::kMillisecond);

void BM_lyapunov_samples(benchmark::State& state)
{
    auto sys = symmetric_proximal();
    for (auto _ : state)
        benchmark::DoNotOptimize(lyapunov_samples(sys, CirclePoint(0.1234567), 10000, 32, 1, mode(state)));
    label(state);
}
BENCHMARK(BM_lyapunov_samples)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_leaf_lyapunov(benchmark::State& state)
{
    HyperbolicParams p;
    p.kappa = 2.0;
    p.dt = 0.01;
    p.horizon = 100.0;
    p.delta = 1.0;
    for (auto _ : state)
        benchmark::DoNotOptimize(leaf_lyapunov_samples(p, 0.0, 1.0, 64, 1, mode(state)));
    label(state);
}
BENCHMARK(BM_leaf_lyapunov)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
