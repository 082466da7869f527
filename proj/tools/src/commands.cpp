#include "emff_cli/commands.hpp"

#include <cstdio>
#include <ostream>

#include <emff/allocation.hpp>
#include <emff/power.hpp>

namespace emff::cli {
namespace {

nlohmann::json to_json(const Vec3& v) { return nlohmann::json::array({v[0], v[1], v[2]}); }

nlohmann::json to_json(const DipoleWaveform& d) {
  return {{"sin_Am2", to_json(d.s)}, {"cos_Am2", to_json(d.c)}, {"omega_rad_per_s", d.omega}};
}

}  // namespace

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

nlohmann::json allocate_report(const AllocateArgs& args) {
  AllocationOptions options;
  options.dual_tolerance = args.tolerance;
  options.frame = args.line_of_sight ? CommandFrame::kLineOfSight : CommandFrame::kWorld;
  const Wrench command{args.force, args.torque};
  const AllocationSolution sol = allocate(args.r, args.hint, command, args.omega, options);

  nlohmann::json out;
  out["dipole_j"] = to_json(sol.dipole_j);
  out["dipole_k"] = to_json(sol.dipole_k);
  out["J_p_A2m4"] = sol.primal_objective;
  out["J_d_A2m4"] = sol.dual_objective;
  out["gap"] = sol.gap;
  out["wrench_residual"] = sol.wrench_residual.norm();
  out["wrench_residual_relative"] =
      command.norm() > 0.0 ? sol.wrench_residual.norm() / command.norm() : 0.0;
  out["frame"] = args.line_of_sight ? "line_of_sight" : "world";
  if (sol.certificate) {
    out["newton_steps"] = sol.certificate->newton_steps;
    out["sigma_max"] = sol.certificate->sigma_max;
  }
  return out;
}

void write_scan_csv(const Scenario& scenario, std::ostream& out, bool extended, int threads) {
  const DisturbanceField field = scenario.field();
  const TimeGrid grid = TimeGrid::uniform(field.period(), scenario.samples);
  PowerOptions options = scenario.power;
  options.threads = threads;

  out << "n,N_l,r_l_m,chi_sys_kg,W_bar_W,W_oint_W,M_A2m4_per_kg,gamma_S";
  if (extended) {
    out << ",W_bar_jn_W,peak_order_violations,peak_order_worst_ratio";
  }
  out << '\n';
  for (int n : scenario.n_values) {
    const GridConfig cfg = scenario.grid(n);
    const PowerReport report = evaluate_power(cfg, field, scenario.coil, grid, options);
    out << n << ',' << cfg.line_count() << ',' << format_number(report.r_l) << ','
        << format_number(report.chi) << ',' << format_number(report.W_bar) << ','
        << format_number(report.W_oint) << ',' << format_number(report.M) << ','
        << format_number(report.gamma_S);
    if (extended) {
      out << ',' << format_number(report.W_bar_jn) << ',' << report.peak_order_violations << ','
          << format_number(report.peak_order_worst_ratio);
    }
    out << '\n';
    out.flush();
  }
}

void write_orbit_csv(const Scenario& scenario, std::ostream& out) {
  const OrbitContext ctx = scenario.context();
  const double period = ctx.period();
  const int count = scenario.samples;

  out << "t_s,x_m,y_m,z_m,K11,K12,K13,K21,K22,K23,K31,K32,K33,K_core_trace\n";
  for (int i = 0; i < count; ++i) {
    const double t = period * i / (count - 1);
    const Vec3 p = desired_trajectory(scenario.plane, ctx, t);
    const Mat3 k = j2_disturbance_matrix(ctx, t);
    out << format_number(t);
    for (int a = 0; a < 3; ++a) {
      out << ',' << format_number(p[a]);
    }
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        out << ',' << format_number(k(a, b));
      }
    }
    out << ',' << format_number(j2_gradient_fluctuation(ctx, t).trace()) << '\n';
  }
}

}  // namespace emff::cli
