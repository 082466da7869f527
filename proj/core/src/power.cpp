#include "emff/power.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "emff/dual_solver.hpp"
#include "emff/parallel.hpp"

namespace emff {
namespace {

constexpr double kPeakOrderSlack = 1e-7;

void check_grid(const TimeGrid& grid) {
  if (grid.times.empty()) {
    throw InputError("time grid is empty");
  }
  if (!(grid.period > 0.0) || !std::isfinite(grid.period)) {
    throw InputError("time grid period must be positive");
  }
}

// J_d at t and t + T/4 for one j. On a grid whose size is a multiple of four
// the shifted sample is usually itself a grid point and is reused.
std::vector<double> paired_series(const GridConfig& cfg, const DisturbanceField& field, int j,
                                  const TimeGrid& grid, const PowerOptions& options) {
  const std::size_t count = grid.size();
  const double quarter = 0.25 * field.period();
  const bool uniform_shift =
      count % 4 == 0 && std::abs(grid.period - field.period()) <= 1e-12 * field.period();

  std::vector<double> base(count);
  parallel_for(count, options.threads, [&](std::size_t i) {
    base[i] = pair_dual_objective(cfg, field, j, grid.times[i], options.dual_tolerance);
  });
  // K and p̂ turn at slightly different rates, so samples that wrap past T
  // are solved afresh rather than reused.
  const std::size_t reused = uniform_shift ? count - count / 4 : 0;
  std::vector<double> shifted(count);
  for (std::size_t i = 0; i < reused; ++i) {
    shifted[i] = base[i + count / 4];
  }
  parallel_for(count - reused, options.threads, [&](std::size_t k) {
    const std::size_t i = reused + k;
    shifted[i] =
        pair_dual_objective(cfg, field, j, grid.times[i] + quarter, options.dual_tolerance);
  });
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = 2.0 * (base[i] + shifted[i]);
  }
  return out;
}

double unscaled_w_star(const GridConfig& cfg, const DisturbanceField& field, int j, double t,
                       double tol) {
  return 2.0 * (pair_dual_objective(cfg, field, j, t, tol) +
                pair_dual_objective(cfg, field, j, t + 0.25 * field.period(), tol));
}

// Golden-section search for the maximum of w*(2, ·) in the cells adjacent to
// the grid argmax.
double refine_peak(const GridConfig& cfg, const DisturbanceField& field, const TimeGrid& grid,
                   const std::vector<double>& series, const PowerOptions& options) {
  const auto best = std::max_element(series.begin(), series.end());
  double peak = *best;
  if (grid.size() < 3 || peak <= 0.0) {
    return peak;
  }
  const std::size_t i = static_cast<std::size_t>(best - series.begin());
  const double step = grid.period / static_cast<double>(grid.size());
  double a = grid.times[i] - step;
  double b = grid.times[i] + step;
  const double stop = options.refine_tolerance * grid.period;
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  auto f = [&](double t) { return unscaled_w_star(cfg, field, 2, t, options.dual_tolerance); };

  double x1 = b - ratio * (b - a);
  double x2 = a + ratio * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > stop) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - ratio * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + ratio * (b - a);
      f2 = f(x2);
    }
  }
  return std::max({peak, f1, f2});
}

double mean(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) {
    sum += x;
  }
  return sum / static_cast<double>(v.size());
}

// Σ_j mean_t w*(j,t), the periodic trapezoid rule on a uniform grid.
double summed_mean(const GridConfig& cfg, const DisturbanceField& field, const TimeGrid& grid,
                   const PowerOptions& options) {
  double total = 0.0;
  for (int j = 2; j <= cfg.n + 1; ++j) {
    total += mean(paired_series(cfg, field, j, grid, options));
  }
  return total;
}

}  // namespace

TimeGrid TimeGrid::uniform(double period, int samples) {
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw InputError("time grid period must be positive");
  }
  if (samples < 1) {
    throw InputError("time grid needs at least one sample");
  }
  TimeGrid grid;
  grid.period = period;
  grid.times.resize(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    grid.times[static_cast<std::size_t>(i)] = period * i / samples;
  }
  return grid;
}

double power_index(const CoilDesign& coil, double j_d) {
  if (!(j_d >= 0.0) || !std::isfinite(j_d)) {
    throw InputError("J_d must be finite and nonnegative");
  }
  return coil.resistance_per_gain_sq() * j_d;
}

double pair_dual_objective(const GridConfig& cfg, const DisturbanceField& field, int j, double t,
                           double dual_tolerance) {
  cfg.validate();
  const Weighting w = weighting(cfg.n, j);
  const Vec3 p = field.direction(t);
  const Vec6 command = w.matrix() * unit_wrench(field.k(t), cfg.r_l() * p);
  if (command.norm() == 0.0) {
    return 0.0;
  }
  try {
    const InteractionOperator op = interaction_operator(-cfg.d_sat * p, Vec3::UnitZ());
    return solve_dual(DualProblem::line_of_sight(op, Wrench::from_stacked(command)),
                      dual_tolerance)
        .objective;
  } catch (const NumericError& e) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "dual solve failed at n=" << cfg.n << ", j=" << j << ", t=" << t << ": " << e.what();
    throw PowerSolveError(msg.str(), cfg.n, j, t);
  }
}

double pair_power_w_star(const GridConfig& cfg, const DisturbanceField& field,
                         const CoilDesign& coil, int j, double t, const PowerOptions& options) {
  coil.validate();
  return coil.resistance_per_gain_sq() * unscaled_w_star(cfg, field, j, t, options.dual_tolerance);
}

double peak_power(const GridConfig& cfg, const DisturbanceField& field, const CoilDesign& coil,
                  const TimeGrid& grid, const PowerOptions& options) {
  check_grid(grid);
  coil.validate();
  const auto series = paired_series(cfg, field, 2, grid, options);
  return cfg.chi() * coil.resistance_per_gain_sq() *
         refine_peak(cfg, field, grid, series, options);
}

double total_power(const GridConfig& cfg, const DisturbanceField& field, const CoilDesign& coil,
                   const TimeGrid& grid, const PowerOptions& options) {
  check_grid(grid);
  coil.validate();
  return cfg.chi() * cfg.line_count() * coil.resistance_per_gain_sq() *
         summed_mean(cfg, field, grid, options);
}

double dipole_metric(const GridConfig& cfg, const DisturbanceField& field, const TimeGrid& grid,
                     const PowerOptions& options) {
  check_grid(grid);
  return cfg.chi() * cfg.line_count() * summed_mean(cfg, field, grid, options) / cfg.m_sys;
}

double surface_ratio(int n_l) {
  if (n_l < 1) {
    throw InputError("N_l must be positive");
  }
  // One Newton step in extended precision makes perfect cubes exact.
  const long double square = static_cast<long double>(n_l) * n_l;
  long double y = std::cbrt(static_cast<double>(square));
  y -= (y * y * y - square) / (3.0L * y * y);
  return static_cast<double>(y);
}

PowerReport evaluate_power(const GridConfig& cfg, const DisturbanceField& field,
                           const CoilDesign& coil, const TimeGrid& grid,
                           const PowerOptions& options) {
  check_grid(grid);
  cfg.validate();
  coil.validate();
  const double ratio = coil.resistance_per_gain_sq();

  PowerReport report;
  report.n = cfg.n;
  report.r_l = cfg.r_l();
  report.chi = cfg.chi();
  report.samples = grid.times;
  for (int j = 2; j <= cfg.n + 1; ++j) {
    report.w_star.push_back(paired_series(cfg, field, j, grid, options));
  }

  const auto& w2 = report.w_star.front();
  report.W_bar = report.chi * ratio * refine_peak(cfg, field, grid, w2, options);
  if (cfg.n >= 2) {
    const auto& wn = report.w_star[static_cast<std::size_t>(cfg.n - 2)];
    report.W_bar_jn = report.chi * ratio * *std::max_element(wn.begin(), wn.end());
  } else {
    report.W_bar_jn = report.chi * ratio * *std::max_element(w2.begin(), w2.end());
  }

  double summed = 0.0;
  for (const auto& series : report.w_star) {
    summed += mean(series);
  }
  const double unscaled_total = report.chi * cfg.line_count() * summed;
  report.W_oint = unscaled_total * ratio;
  report.M = unscaled_total / cfg.m_sys;
  report.gamma_S = surface_ratio(cfg.line_count());

  const double floor = 1e-14 * *std::max_element(w2.begin(), w2.end());
  for (std::size_t jj = 1; jj < report.w_star.size(); ++jj) {
    for (std::size_t i = 0; i < w2.size(); ++i) {
      const double wj = report.w_star[jj][i];
      if (wj > w2[i] * (1.0 + kPeakOrderSlack) + floor) {
        ++report.peak_order_violations;
      }
      if (w2[i] > floor) {
        report.peak_order_worst_ratio = std::max(report.peak_order_worst_ratio, wj / w2[i]);
      }
    }
  }
  return report;
}

}  // namespace emff
