#include <benchmark/benchmark.h>

#include "rvheal/harness.hpp"

namespace {

using namespace rvheal;

const char* const kCorpus[] = {
    "G (!isUnknown)", "G (isStarted && lowException)", "G (present)",
    "G (isStartedComponent1 && isStartedComponent2 && connector)",
    "F a", "X a", "a U b", "a R b", "G F a", "F G a",
};

void BM_BuildMonitor(benchmark::State& state) {
  const auto f = ltl::parse(kCorpus[state.range(0)]);
  state.SetLabel(kCorpus[state.range(0)]);
  for (auto _ : state) benchmark::DoNotOptimize(monitor::build_monitor(f));
}
BENCHMARK(BM_BuildMonitor)->DenseRange(0, 9);

void BM_OracleCheck(benchmark::State& state) {
  const auto f = ltl::parse(kCorpus[3]);
  for (auto _ : state) benchmark::DoNotOptimize(harness::check_formula(f, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_OracleCheck)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_InstantiateMonitors(benchmark::State& state) {
  const auto a = arch::Architecture::load(arch::default_architecture());
  for (auto _ : state) benchmark::DoNotOptimize(mape::instantiate_monitors(a));
}
BENCHMARK(BM_InstantiateMonitors)->Unit(benchmark::kMicrosecond);

// One healthy loop tick over the default architecture.
void BM_HealthyIteration(benchmark::State& state) {
  const auto mode = state.range(0) ? mape::Mode::Baseline : mape::Mode::Rv;
  state.SetLabel(std::string(mape::to_string(mode)));
  mape::HealingLoop loop(arch::Architecture::load(arch::default_architecture()), {}, mode);
  int i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(loop.run_iteration(i++));
}
BENCHMARK(BM_HealthyIteration)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

// Inject-detect-heal cycle for each failure kind.
void BM_FailureIteration(benchmark::State& state) {
  const auto kind = static_cast<fault::FailureKind>(state.range(0));
  const std::string target = kind == fault::FailureKind::CF4 ? "k2" : "Query_Service";
  state.SetLabel(std::string(fault::to_string(kind)));
  std::vector<fault::InjectionSpec> schedule;
  const int n = 1 << 16;
  for (int i = 0; i < n; ++i) schedule.push_back({i, kind, target});
  auto make = [&] { return mape::HealingLoop(arch::Architecture::load(arch::default_architecture()), schedule, mape::Mode::Rv); };
  auto loop = make();
  int i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(loop.run_iteration(i++));
    if (i == n) {
      state.PauseTiming();
      loop = make();
      i = 0;
      state.ResumeTiming();
    }
  }
}
BENCHMARK(BM_FailureIteration)->DenseRange(0, 3)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
