#include <benchmark/benchmark.h>
#include <spdlog/spdlog.h>

#include "lipsyn/reference_cases.h"
#include "lipsyn/simulation/simulate.h"
#include "lipsyn/synthesis/initialization.h"
#include "lipsyn/synthesis/sca.h"

namespace {

void quiet() { spdlog::set_level(spdlog::level::err); }

void BM_InitialLyapunov(benchmark::State& state) {
  quiet();
  const auto rc = state.range(0) == 1 ? lipsyn::example1_case(false) : lipsyn::example2_case(false);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lipsyn::synthesis::step1_initial_lyapunov(rc.plant, rc.config.alpha_init, rc.config.rho));
  }
}
BENCHMARK(BM_InitialLyapunov)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_ScaSubproblem(benchmark::State& state) {
  quiet();
  const auto rc = lipsyn::example1_case(false);
  const auto res = lipsyn::synthesis::run_sca(rc.plant, rc.config);
  const auto& start = res.history.front().iterate;
  for (auto _ : state) {
    const auto sp = lipsyn::synthesis::build_sca_lmi(rc.plant, start);
    benchmark::DoNotOptimize(lipsyn::lmi::solve(sp.problem));
  }
}
BENCHMARK(BM_ScaSubproblem)->Unit(benchmark::kMillisecond);

void BM_RunSca(benchmark::State& state) {
  quiet();
  const auto rc = state.range(0) == 1 ? lipsyn::example1_case(false) : lipsyn::example2_case(false);
  for (auto _ : state) benchmark::DoNotOptimize(lipsyn::synthesis::run_sca(rc.plant, rc.config));
}
BENCHMARK(BM_RunSca)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_Rollout(benchmark::State& state) {
  const auto rc = lipsyn::example2_case(false);
  const int steps = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        lipsyn::simulation::simulate_closed_loop(rc.plant, rc.published_gain, rc.x0, steps));
  }
  state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK(BM_Rollout)->Arg(5000)->Arg(40000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
