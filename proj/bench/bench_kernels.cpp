// Serial reference vs OpenMP path for each data-parallel kernel.
// Argument 0 selects the serial path, 1 the parallel one.

#include <benchmark/benchmark.h>

#include "kahler/hessian.hpp"
#include "kahler/modelspace.hpp"
#include "kahler/riccati.hpp"
#include "kahler/volume.hpp"

namespace {

using namespace kahler;

Exec exec_of(const benchmark::State& st) { return st.range(0) == 0 ? Exec::serial : Exec::parallel; }

void BM_Bisectional(benchmark::State& st) {
  const auto chart = model::make_fubini_study(3, 1.0);
  const auto pts = model::sample_points(*chart, 256, 0.8, 3);
  for (auto _ : st)
    benchmark::DoNotOptimize(model::bisectional_lower_bound_estimate(*chart, pts, 16, 3, exec_of(st)));
}
BENCHMARK(BM_Bisectional)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_RiccatiSuite(benchmark::State& st) {
  TolerancePolicy tol;
  tol.psd_slack = hessian::verdict_slack(1e-3);
  for (auto _ : st) benchmark::DoNotOptimize(riccati::run_suite(24, 4, 7, tol, {}, exec_of(st)));
}
BENCHMARK(BM_RiccatiSuite)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_VolumeQuadrature(benchmark::State& st) {
  const auto chart = model::make_fubini_study(2, 1.0);
  volume::QuadratureOptions q;
  q.exec = exec_of(st);
  for (auto _ : st) benchmark::DoNotOptimize(volume::volume_quadrature(*chart, q));
}
BENCHMARK(BM_VolumeQuadrature)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SweepFiniteDifference(benchmark::State& st) {
  hessian::SweepConfig cfg;
  cfg.space = {"fubini_study", 2, 1.0, {}};
  cfg.K_bound = 1.0;
  for (int i = 0; i < 21; ++i) cfg.t_grid.push_back(0.1 + 0.09 * i);
  cfg.with_jacobi = false;
  cfg.exec = exec_of(st);
  for (auto _ : st) benchmark::DoNotOptimize(hessian::run_sweep(cfg));
}
BENCHMARK(BM_SweepFiniteDifference)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
