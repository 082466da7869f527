#include <benchmark/benchmark.h>

#include <emff/allocation.hpp>
#include <emff/dual_solver.hpp>

namespace {

using namespace emff;

Wrench sample_command() {
  const DipoleWaveform dj{Vec3(3.0, -1.0, 2.0), Vec3(0.5, 2.0, -1.0), 1.0};
  const DipoleWaveform dk{Vec3(-2.0, 1.5, 0.5), Vec3(1.0, 0.0, 2.5), 1.0};
  return averaged_wrench(interaction_operator(Vec3(1.2, -0.4, 0.7), Vec3::UnitZ()), dj, dk);
}

void BM_SolveDual(benchmark::State& state) {
  const auto op = interaction_operator(Vec3(1.2, -0.4, 0.7), Vec3::UnitZ());
  const DualProblem problem = DualProblem::line_of_sight(op, sample_command());
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_dual(problem));
  }
}
BENCHMARK(BM_SolveDual);

void BM_Allocate(benchmark::State& state) {
  const Wrench command = sample_command();
  for (auto _ : state) {
    benchmark::DoNotOptimize(allocate(Vec3(1.2, -0.4, 0.7), Vec3::UnitZ(), command, 1.0));
  }
}
BENCHMARK(BM_Allocate);

void BM_BruteForce(benchmark::State& state) {
  const Wrench command = sample_command();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        brute_force_allocate(Vec3(1.2, -0.4, 0.7), Vec3::UnitZ(), command, 20, 1));
  }
}
BENCHMARK(BM_BruteForce)->Unit(benchmark::kMillisecond);

}  // namespace
