#include <gpb/conditioning.hpp>

#include <benchmark/benchmark.h>

using namespace gpb;

namespace {

const Point lo = make_point({-1.0, -1.0});
const Point hi = make_point({1.0, 1.0});

void BM_Gram(benchmark::State& state) {
    const auto k = Kernel::squared_exponential(2);
    const auto pts = latin_hypercube(static_cast<std::size_t>(state.range(0)), 2, 1);
    for (auto _ : state) benchmark::DoNotOptimize(gram(k, pts));
}
BENCHMARK(BM_Gram)->Arg(64)->Arg(256);

void BM_NystromEig(benchmark::State& state) {
    const auto k = Kernel::squared_exponential(2);
    const auto q = quadrature(rect_boundary(lo, hi), static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(nystrom_eig(k, q));
}
BENCHMARK(BM_NystromEig)->Arg(64)->Arg(128)->Arg(256);

void BM_Constrain(benchmark::State& state) {
    const GP prior(Kernel::squared_exponential(2));
    FormSpec spec;
    spec.backend = state.range(0) == 0 ? RkhsForm::Backend::Interpolation : RkhsForm::Backend::Spectral;
    spec.nodes = 64;
    spec.retained = 40;
    const ScalarField g = [](const Point& p) { return p(0) * p(1); };
    for (auto _ : state) benchmark::DoNotOptimize(constrain(prior, rect_boundary(lo, hi), g, spec));
}
BENCHMARK(BM_Constrain)->Arg(0)->Arg(1);

void BM_EvaluateConstrained(benchmark::State& state) {
    const GP prior(Kernel::squared_exponential(2));
    FormSpec spec;
    spec.nodes = 64;
    const auto cgp = constrain(prior, rect_boundary(lo, hi), [](const Point& p) { return p(0); }, spec);
    const auto probes = latin_hypercube(200, 2, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(cgp.mean(probes));
        benchmark::DoNotOptimize(cgp.cov(probes));
    }
}
BENCHMARK(BM_EvaluateConstrained);

}  // namespace
BENCHMARK_MAIN();
