#include <cmath>
#include <numbers>
#include <optional>

#include <gtest/gtest.h>

#include <emff/dual_solver.hpp>
#include <emff/errors.hpp>
#include <emff/power.hpp>

#include "support/oracles.hpp"

namespace emff {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

const CoilDesign kCoil{100, 0.5, 1e-3, 1.7e-8};

DisturbanceField reference_field(std::optional<double> k_j2 = std::nullopt) {
  const OrbitContext ctx = make_context(500e3, 45.0 * kDeg, 0.0, k_j2);
  return DisturbanceField::from_orbit(ctx, StablePlane{30.0 * kDeg, 0.0, 1.0, 0.0});
}

DisturbanceField scaled(const DisturbanceField& field, double factor) {
  return DisturbanceField([field, factor](double t) -> Mat3 { return factor * field.k(t); },
                          [field](double t) { return field.direction(t); }, field.period());
}

TEST(PowerIndex, Arithmetic) {
  EXPECT_EQ(power_index(kCoil, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(power_index(kCoil, 2.0), 2.0 * kCoil.resistance_per_gain_sq());
  EXPECT_THROW(power_index(kCoil, -1.0), InputError);
}

TEST(SurfaceRatio, TwoThirdsPower) {
  EXPECT_DOUBLE_EQ(surface_ratio(1), 1.0);
  EXPECT_NEAR(surface_ratio(8), 4.0, 1e-15);
  EXPECT_NEAR(surface_ratio(27), 9.0, 1e-14);
  const double slope = std::log(surface_ratio(1000) / surface_ratio(10)) / std::log(100.0);
  EXPECT_NEAR(slope, 2.0 / 3.0, 1e-14);
  EXPECT_THROW(surface_ratio(0), InputError);
}

TEST(TimeGrid, UniformHalfOpen) {
  const TimeGrid grid = TimeGrid::uniform(10.0, 4);
  ASSERT_EQ(grid.size(), 4u);
  EXPECT_EQ(grid.times.front(), 0.0);
  EXPECT_DOUBLE_EQ(grid.times.back(), 7.5);
  EXPECT_THROW(TimeGrid::uniform(10.0, 0), InputError);
  EXPECT_THROW(TimeGrid::uniform(-1.0, 4), InputError);
}

TEST(PairPower, MatchesTwoDualSolves) {
  const DisturbanceField field = reference_field();
  const GridConfig cfg = GridConfig::from_length(3, 100.0, 10.0);
  const double t = 1234.0;
  double expected = 0.0;
  for (double tx : {t, t + 0.25 * field.period()}) {
    const Vec3 p = field.direction(tx);
    const Vec6 u = weighting(3, 3).matrix() * unit_wrench(field.k(tx), cfg.r_l() * p);
    const auto op = interaction_operator(-cfg.d_sat * p, Vec3::UnitX());
    expected += solve_dual(DualProblem::world(op, Wrench::from_stacked(u))).objective;
  }
  expected *= 2.0 * kCoil.resistance_per_gain_sq();
  EXPECT_NEAR(pair_power_w_star(cfg, field, kCoil, 3, t) / expected, 1.0, 1e-8);
}

TEST(PairPower, ZeroFieldAndRange) {
  const DisturbanceField field = reference_field(0.0);
  const GridConfig cfg = GridConfig::from_length(2, 100.0, 10.0);
  EXPECT_EQ(pair_power_w_star(cfg, field, kCoil, 2, 100.0), 0.0);
  EXPECT_THROW(pair_power_w_star(cfg, field, kCoil, 4, 100.0), InputError);
}

TEST(PairPower, LinearInDisturbanceMagnitude) {
  const DisturbanceField field = reference_field();
  const GridConfig cfg = GridConfig::from_length(2, 100.0, 10.0);
  for (double t : {0.0, 900.0, 3100.0}) {
    const double a = pair_power_w_star(cfg, field, kCoil, 2, t);
    const double b = pair_power_w_star(cfg, scaled(field, 2.0), kCoil, 2, t);
    EXPECT_NEAR(b / a, 2.0, 2e-8);
  }
}

TEST(PairPower, CentreCommandIndependentOfN) {
  // L(n, 2) = I, so the centre-pair command depends only on r_l; the pair
  // spacing r_l/(2n+1) still changes with n.
  const DisturbanceField field = reference_field();
  const double t = 500.0;
  const Vec6 reference = unit_wrench(field.k(t), 10.0 * field.direction(t));
  for (int n = 1; n <= 8; ++n) {
    const GridConfig cfg = GridConfig::from_length(n, 100.0, 10.0);
    const Vec6 command = weighting(n, 2).matrix() * unit_wrench(field.k(t), cfg.r_l() * field.direction(t));
    EXPECT_LE((command - reference).norm(), 1e-15 * reference.norm());
  }
}

TEST(PeakPower, BoundsEverySample) {
  const DisturbanceField field = reference_field();
  const GridConfig cfg = GridConfig::from_length(2, 100.0, 10.0);
  const TimeGrid grid = TimeGrid::uniform(field.period(), 72);
  const double peak = peak_power(cfg, field, kCoil, grid);
  for (double t : grid.times) {
    EXPECT_GE(peak, cfg.chi() * pair_power_w_star(cfg, field, kCoil, 2, t) * (1.0 - 1e-12));
  }
}

TEST(PeakPower, ZeroFieldAndEmptyGrid) {
  const DisturbanceField field = reference_field(0.0);
  const GridConfig cfg = GridConfig::from_length(2, 100.0, 10.0);
  EXPECT_EQ(peak_power(cfg, field, kCoil, TimeGrid::uniform(field.period(), 16)), 0.0);
  EXPECT_EQ(total_power(cfg, field, kCoil, TimeGrid::uniform(field.period(), 16)), 0.0);
  TimeGrid empty;
  empty.period = field.period();
  EXPECT_THROW(peak_power(cfg, field, kCoil, empty), InputError);
  EXPECT_THROW(total_power(cfg, field, kCoil, empty), InputError);
}

TEST(PeakPower, LinearInSystemMass) {
  const DisturbanceField field = reference_field();
  const TimeGrid grid = TimeGrid::uniform(field.period(), 48);
  const double a = peak_power(GridConfig::from_length(3, 50.0, 10.0), field, kCoil, grid);
  const double b = peak_power(GridConfig::from_length(3, 150.0, 10.0), field, kCoil, grid);
  EXPECT_NEAR(b / a, 3.0, 3e-9);
}

TEST(TotalPower, SingleLineFormula) {
  const DisturbanceField field = reference_field();
  const GridConfig cfg = GridConfig::from_length(1, 100.0, 10.0);
  const TimeGrid grid = TimeGrid::uniform(field.period(), 40);
  double mean = 0.0;
  for (double t : grid.times) {
    mean += pair_power_w_star(cfg, field, kCoil, 2, t);
  }
  mean /= static_cast<double>(grid.size());
  EXPECT_NEAR(total_power(cfg, field, kCoil, grid) / (cfg.chi() * 3.0 * mean), 1.0, 1e-9);
}

TEST(TotalPower, GridRefinementConverges) {
  const DisturbanceField field = reference_field();
  const GridConfig cfg = GridConfig::from_length(2, 100.0, 10.0);
  const double coarse = total_power(cfg, field, kCoil, TimeGrid::uniform(field.period(), 360));
  const double fine = total_power(cfg, field, kCoil, TimeGrid::uniform(field.period(), 720));
  EXPECT_LE(std::abs(fine - coarse) / fine, 1e-3);
}

TEST(DipoleMetric, IndependentOfCoilAndMass) {
  const DisturbanceField field = reference_field();
  const TimeGrid grid = TimeGrid::uniform(field.period(), 24);
  const GridConfig cfg = GridConfig::from_length(2, 100.0, 10.0);
  const double m = dipole_metric(cfg, field, grid);
  const CoilDesign other{37, 0.2, 4e-4, 2.8e-8};
  EXPECT_NEAR(total_power(cfg, field, other, grid) / (cfg.m_sys * other.resistance_per_gain_sq()) / m,
              1.0, 1e-12);
  const double heavier = dipole_metric(GridConfig::from_length(2, 200.0, 10.0), field, grid);
  EXPECT_NEAR(heavier / m, 1.0, 1e-12);
}

TEST(DipoleMetric, DecreasesWithGridSize) {
  const DisturbanceField field = reference_field();
  const TimeGrid grid = TimeGrid::uniform(field.period(), 36);
  double previous = INFINITY;
  for (int n = 1; n <= 6; ++n) {
    const double m = dipole_metric(GridConfig::from_length(n, 100.0, 10.0), field, grid);
    EXPECT_LT(m, previous) << "n=" << n;
    previous = m;
  }
}

TEST(EvaluatePower, ConsistentWithSingleMetrics) {
  const DisturbanceField field = reference_field();
  const GridConfig cfg = GridConfig::from_length(3, 100.0, 10.0);
  const TimeGrid grid = TimeGrid::uniform(field.period(), 48);
  const PowerReport report = evaluate_power(cfg, field, kCoil, grid);
  EXPECT_EQ(report.n, 3);
  EXPECT_EQ(report.w_star.size(), 3u);
  EXPECT_EQ(report.samples, grid.times);
  EXPECT_NEAR(report.W_bar / peak_power(cfg, field, kCoil, grid), 1.0, 1e-12);
  EXPECT_NEAR(report.W_oint / total_power(cfg, field, kCoil, grid), 1.0, 1e-12);
  EXPECT_NEAR(report.M / dipole_metric(cfg, field, grid), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(report.gamma_S, surface_ratio(7));
  EXPECT_EQ(report.peak_order_violations, 0);
  for (const auto& row : report.w_star) {
    for (double w : row) {
      EXPECT_GE(w, 0.0);
    }
  }
  // w_star is stored before coil scaling.
  EXPECT_NEAR(report.w_star[1][5] * kCoil.resistance_per_gain_sq() /
                  pair_power_w_star(cfg, field, kCoil, 3, grid.times[5]),
              1.0, 1e-12);
}

TEST(EvaluatePower, ThreadCountDoesNotChangeResults) {
  const DisturbanceField field = reference_field();
  const GridConfig cfg = GridConfig::from_length(2, 100.0, 10.0);
  const TimeGrid grid = TimeGrid::uniform(field.period(), 32);
  PowerOptions serial;
  PowerOptions threaded;
  threaded.threads = 3;
  const PowerReport a = evaluate_power(cfg, field, kCoil, grid, serial);
  const PowerReport b = evaluate_power(cfg, field, kCoil, grid, threaded);
  EXPECT_EQ(a.w_star, b.w_star);
  EXPECT_EQ(a.W_bar, b.W_bar);
  EXPECT_EQ(a.W_oint, b.W_oint);
}

TEST(EvaluatePower, GridNotDivisibleByFour) {
  const DisturbanceField field = reference_field();
  const GridConfig cfg = GridConfig::from_length(1, 100.0, 10.0);
  const TimeGrid grid = TimeGrid::uniform(field.period(), 7);
  const PowerReport report = evaluate_power(cfg, field, kCoil, grid);
  EXPECT_NEAR(report.w_star[0][3] * kCoil.resistance_per_gain_sq() /
                  pair_power_w_star(cfg, field, kCoil, 2, grid.times[3]),
              1.0, 1e-12);
}

}  // namespace
}  // namespace emff
