#include <benchmark/benchmark.h>

#include "spde/chafee.hpp"
#include "spde/linear.hpp"
#include "spde/solver.hpp"

using namespace spde;

namespace {

void BM_PathSample(benchmark::State& state) {
  const auto n = static_cast<double>(state.range(0));
  for (auto _ : state) {
    WienerPath p = WienerPath::sample(7, -n, n, 1e-3);
    benchmark::DoNotOptimize(p.samples().data());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(2000 * n));
}
BENCHMARK(BM_PathSample)->Arg(10)->Arg(100);

void BM_BridgeRefine(benchmark::State& state) {
  const WienerPath p = WienerPath::sample(7, -10.0, 10.0, 1e-2);
  for (auto _ : state) {
    WienerPath fine = p.refined(4);
    benchmark::DoNotOptimize(fine.samples().data());
  }
}
BENCHMARK(BM_BridgeRefine);

void BM_SineSynthesis(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto table = SineTable::get(n, oversampled_points(n));
  std::vector<double> coeffs(static_cast<std::size_t>(n), 0.5);
  std::vector<double> grid(static_cast<std::size_t>(oversampled_points(n)));
  for (auto _ : state) {
    table->synthesize(coeffs, grid);
    benchmark::DoNotOptimize(grid.data());
  }
}
BENCHMARK(BM_SineSynthesis)->Arg(32)->Arg(64)->Arg(128);

void BM_SolverStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ChafeeSpec cs = ChafeeSpec::constant_gamma(1.5, 1.0, 1.0);
  const ProblemSpec spec = make_problem(cs, n, 1e-3);
  const WienerPath p = WienerPath::sample(7, -1.0, 2.0, spec.dt);
  PathwiseSolver solver(spec, PathView(p));
  Field v = single_mode(n, 1, 0.5);
  std::int64_t node = 0;
  for (auto _ : state) {
    v = solver.step(v, static_cast<double>(node) * spec.dt);
    node = (node + 1) % 1000;
    benchmark::DoNotOptimize(v.coeffs().data());
  }
}
BENCHMARK(BM_SolverStep)->Arg(32)->Arg(64)->Arg(128);

void BM_UnitTimeIntegration(benchmark::State& state) {
  const ChafeeSpec cs = ChafeeSpec::constant_gamma(1.5, 1.0, 1.0);
  const ProblemSpec spec = make_problem(cs, 64, 1e-3);
  const WienerPath p = WienerPath::sample(7, -1.0, 2.0, spec.dt);
  for (auto _ : state) {
    PathwiseSolver solver(spec, PathView(p));
    Field end = solver.integrate(single_mode(64, 1, 0.5), 0.0, 1.0);
    benchmark::DoNotOptimize(end.coeffs().data());
  }
}
BENCHMARK(BM_UnitTimeIntegration)->Unit(benchmark::kMillisecond);

void BM_XiQuadrature(benchmark::State& state) {
  const ChafeeSpec cs = ChafeeSpec::constant_gamma(1.5, 1.0, 1.0);
  const ProblemSpec spec = make_problem(cs, 64, 1e-3);
  const WienerPath p = WienerPath::sample(7, -90.0, 1.0, spec.dt);
  XiRequest req{PathView(p)};
  req.tau = 0.0;
  req.spec = &spec;
  req.S = required_truncation(spec, 1e-6);
  for (auto _ : state) {
    XiValue v = xi(req);
    benchmark::DoNotOptimize(v.field.coeffs().data());
  }
}
BENCHMARK(BM_XiQuadrature)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
