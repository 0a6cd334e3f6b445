// Serial reference versus the OpenMP kernels on a rank-2 system.
#include "vortex/preconditioner.hpp"
#include "vortex/states.hpp"
#include "vortex/vortex_model.hpp"

#include <benchmark/benchmark.h>

using namespace vortex;

namespace {

struct Setup {
    SplitSystemConfig cfg{{2, 1}, {{{cd(1)}, {cd(0), cd(1)}}, {{cd(0), cd(1)}, {cd(1)}}}};
    AlphaParam alpha{Rational(1)};
    SphereGrid g;
    MatrixField S;
    explicit Setup(int n) : g(build_grid(n, 1.5)), S(random_smooth_state(cfg, g, 3)) {}
};

void BM_ReferenceDeviation(benchmark::State& st) {
    Setup s(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(reference_deviation(s.cfg, s.S, s.alpha, s.g));
}

void BM_Evaluate(benchmark::State& st, Exec exec) {
    Setup s(static_cast<int>(st.range(0)));
    VortexModel model(s.cfg, s.g, s.alpha);
    for (auto _ : st) benchmark::DoNotOptimize(model.evaluate(s.S, exec));
}

void BM_Precondition(benchmark::State& st, Exec exec) {
    Setup s(static_cast<int>(st.range(0)));
    VortexModel model(s.cfg, s.g, s.alpha);
    auto dev = model.evaluate(s.S).deviation;
    for (auto _ : st) benchmark::DoNotOptimize(precondition(dev, s.cfg, 1.0, s.g, exec));
}

} // namespace

BENCHMARK(BM_ReferenceDeviation)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Evaluate, serial, Exec::serial)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Evaluate, parallel, Exec::parallel)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Precondition, serial, Exec::serial)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Precondition, parallel, Exec::parallel)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
