// Serial reference vs OpenMP kernels. Arg(0) is the serial path; Arg(k > 0)
// runs the parallel path on k threads.

#include <benchmark/benchmark.h>

#include <memory>

#include "opqkd/analysis.hpp"
#include "opqkd/parallel.hpp"
#include "opqkd/protocol.hpp"

using namespace opqkd;

namespace {

ProtocolConfig session_config(int n, std::uint64_t rounds) {
  ProtocolConfig c;
  c.set = std::make_shared<const StateSet>(build_symmetric(n));
  c.rounds = rounds;
  c.seed = 17;
  c.strategy = EveStrategy(Variant::intercept_resend, c.set, 17);
  return c;
}

void BM_Session(benchmark::State& state) {
  const auto config = session_config(5, 50000);
  const auto threads = static_cast<int>(state.range(0));
  if (threads > 0) set_thread_count(threads);
  for (auto _ : state) {
    auto r = threads == 0 ? run_session_serial(config) : run_session(config);
    benchmark::DoNotOptimize(r.records.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(config.rounds));
}

void BM_MonteCarlo(benchmark::State& state) {
  const StateSet set = build_symmetric(7);
  const auto threads = static_cast<int>(state.range(0));
  if (threads > 0) set_thread_count(threads);
  const Execution exec = threads == 0 ? Execution::serial : Execution::parallel;
  for (auto _ : state) {
    auto r = monte_carlo_estimate(set, Variant::measure_second_only, 50000, 3, exec);
    benchmark::DoNotOptimize(r.successes);
  }
  state.SetItemsProcessed(state.iterations() * 50000);
}

void BM_ExactEnumeration(benchmark::State& state) {
  const StateSet set = build_symmetric(11);
  const auto threads = static_cast<int>(state.range(0));
  if (threads > 0) set_thread_count(threads);
  const Execution exec = threads == 0 ? Execution::serial : Execution::parallel;
  for (auto _ : state) {
    auto r = exact_undetected_prob(set, Variant::intercept_resend, exec);
    benchmark::DoNotOptimize(r.value);
  }
}

}  // namespace

BENCHMARK(BM_Session)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarlo)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExactEnumeration)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
