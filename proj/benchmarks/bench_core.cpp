#include <benchmark/benchmark.h>

#include <gjcm/evolution.hpp>
#include <gjcm/fieldstate.hpp>
#include <gjcm/oracle.hpp>

using namespace gjcm;

namespace {

const RunConfig& config() {
  static const RunConfig c = default_run_config();
  return c;
}

const FieldDensityMatrix& half_revival_rho() {
  static const FieldDensityMatrix rho = [] {
    const RunConfig& c = config();
    const PhysicalParams p = c.physical.with_q_dot_g(1e7);
    return reduced_density(evolve(build_initial(c.sim, c.packet), p, half_revival_time(p)));
  }();
  return rho;
}

void BM_WignerSeries(benchmark::State& state) {
  const FieldDensityMatrix& rho = half_revival_rho();
  for (auto _ : state) benchmark::DoNotOptimize(wigner_series(rho, complex(2.6, 3.4)));
}
BENCHMARK(BM_WignerSeries);

void BM_WignerMap(benchmark::State& state) {
  const FieldDensityMatrix& rho = half_revival_rho();
  GridSpec grid;
  grid.nx = grid.ny = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(wigner_map(rho, grid).min_value);
  state.SetItemsProcessed(state.iterations() * grid.nx * grid.ny);
}
BENCHMARK(BM_WignerMap)->Arg(21)->Arg(81)->Unit(benchmark::kMillisecond);

void BM_Evolve(benchmark::State& state) {
  const RunConfig& c = config();
  const InitialState init = build_initial(c.sim, c.packet);
  const PhysicalParams p = c.physical.with_q_dot_g(static_cast<double>(state.range(0)));
  const double t = half_revival_time(p);
  for (auto _ : state) benchmark::DoNotOptimize(evolve(init, p, t).time);
}
// 0 takes the quadrature branch of the phase integral, 1e7 the closed form.
BENCHMARK(BM_Evolve)->Arg(0)->Arg(10000000)->Unit(benchmark::kMicrosecond);

void BM_IntegrateBlock(benchmark::State& state) {
  const PhysicalParams p = config().physical.with_q_dot_g(1.5e7);
  const Eigen::Vector2cd start(1.0, 0.0);
  const double t = half_revival_time(p);
  StepPolicy policy;
  policy.steps_per_period = static_cast<int>(state.range(0));
  long steps = 0;
  for (auto _ : state) {
    const BlockRun run = integrate_block(p, 0.0, 25, start, t, policy);
    steps += run.steps;
    benchmark::DoNotOptimize(run.amplitudes);
  }
  state.counters["steps/s"] = benchmark::Counter(static_cast<double>(steps), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_IntegrateBlock)->Arg(256)->Arg(2048)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
