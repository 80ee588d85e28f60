#include <benchmark/benchmark.h>

#include "loadbal/experiment.hpp"
#include "loadbal/payments.hpp"
#include "loadbal/verify.hpp"

using namespace loadbal;

namespace {

Execution exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::Serial : Execution::Parallel;
}

Instance bench_instance(std::size_t m, std::size_t n, std::uint64_t seed) {
  FamilySpec fs;
  fs.m = m;
  fs.n = n;
  fs.seed = seed;
  fs.raw_speeds = true;
  fs.speed_max = 16;
  return generate(fs);
}

void BM_OptExact(benchmark::State& state) {
  const Instance instance = bench_instance(5, 16, 3);
  OptOptions options;
  options.execution = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(opt_exact(instance, Rational(1), options));
}

void BM_Sweep(benchmark::State& state) {
  SweepConfig config;
  config.family.n = 12;
  config.m_list = {2, 4, 8};
  for (std::uint64_t s = 0; s < 8; ++s) config.seeds.push_back(s);
  config.mechanism = MechanismSpec::parse("ppr");
  for (auto _ : state) benchmark::DoNotOptimize(sweep(config, exec_of(state)));
}

void BM_WorkloadCurve(benchmark::State& state) {
  const Instance instance = bench_instance(8, 60, 5);
  CurveOptions options;
  options.execution = exec_of(state);
  const auto spec = MechanismSpec::ppr_with_base(2);
  for (auto _ : state) benchmark::DoNotOptimize(workload_curve(instance, spec, MachineId{0}, options));
}

void BM_TruthScan(benchmark::State& state) {
  const Instance instance = bench_instance(8, 60, 7);
  const auto spec = MechanismSpec::parse("ppr");
  const auto grid = default_misreport_grid(instance, 59);
  for (auto _ : state) {
    benchmark::DoNotOptimize(scan_job_truthfulness(instance, spec, 59, grid, exec_of(state)));
  }
}

void BM_MonotonicityScan(benchmark::State& state) {
  const Instance instance = bench_instance(8, 60, 9);
  const auto spec = MechanismSpec::ppr_with_base(2);
  const auto grid = default_bid_grid(instance, spec);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        scan_machine_monotonicity(instance, spec, MachineId{0}, grid, exec_of(state)));
  }
}

}  // namespace

// Argument 0 is the serial reference, 1 the OpenMP path.
BENCHMARK(BM_OptExact)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WorkloadCurve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TruthScan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonotonicityScan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
