#include <numbers>

#include <benchmark/benchmark.h>

#include <emff/orbit.hpp>
#include <emff/power.hpp>

namespace {

using namespace emff;

constexpr double kDeg = std::numbers::pi / 180.0;

DisturbanceField reference_field() {
  const OrbitContext ctx = make_context(500e3, 45.0 * kDeg, 0.0);
  return DisturbanceField::from_orbit(ctx, StablePlane{30.0 * kDeg, 0.0, 1.0, 0.0});
}

void BM_EvaluatePower(benchmark::State& state) {
  const DisturbanceField field = reference_field();
  const TimeGrid grid = TimeGrid::uniform(field.period(), 720);
  const GridConfig cfg = GridConfig::from_length(static_cast<int>(state.range(0)), 100.0, 10.0);
  PowerOptions options;
  options.threads = static_cast<int>(state.range(1));
  const CoilDesign coil{100, 0.5, 1e-3, 1.7e-8};
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate_power(cfg, field, coil, grid, options));
  }
}
BENCHMARK(BM_EvaluatePower)
    ->Args({1, 1})
    ->Args({5, 1})
    ->Args({10, 1})
    ->Args({10, 4})
    ->Unit(benchmark::kMillisecond);

}  // namespace
