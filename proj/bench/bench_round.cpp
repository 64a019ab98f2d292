#include "fivegcs/algorithms.hpp"
#include "fivegcs/synthetic.hpp"

#include <benchmark/benchmark.h>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace fivegcs;

namespace {

const Problem& bench_problem() {
  static const Problem p = [] {
    SyntheticSpec spec;
    spec.kind = SyntheticKind::logistic;
    spec.dimension = 100;
    spec.points = 200;
    spec.kappa = 1000;
    return make_logistic_problem(spec, 16);
  }();
  return p;
}

void round_with(benchmark::State& state, Execution execution, SolverKind kind) {
  const Problem& p = bench_problem();
  const auto cohort = static_cast<std::size_t>(state.range(0));
  const Schedule s = schedule_thm2(p, cohort);
  RoundOptions o;
  o.execution = execution;
  o.solver.kind = kind;
  o.solver.local_steps = 20;
  ServerState st = initial_state(p);
  for (auto _ : state) {
    st = advance(p, st, draw_cohort(p.clients(), cohort, 1, st.round), s, o, 1);
    benchmark::DoNotOptimize(st.x.data());
  }
  state.counters["clients/s"] = benchmark::Counter(static_cast<double>(cohort), benchmark::Counter::kIsRate);
#ifdef _OPENMP
  state.counters["threads"] = execution == Execution::parallel ? omp_get_max_threads() : 1;
#endif
}

void BM_RoundSerialGd(benchmark::State& s) { round_with(s, Execution::serial, SolverKind::gd); }
void BM_RoundParallelGd(benchmark::State& s) { round_with(s, Execution::parallel, SolverKind::gd); }
void BM_RoundSerialLsvrg(benchmark::State& s) { round_with(s, Execution::serial, SolverKind::lsvrg); }
void BM_RoundParallelLsvrg(benchmark::State& s) { round_with(s, Execution::parallel, SolverKind::lsvrg); }

}  // namespace

BENCHMARK(BM_RoundSerialGd)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RoundParallelGd)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RoundSerialLsvrg)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RoundParallelLsvrg)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
