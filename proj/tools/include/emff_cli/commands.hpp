#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include <emff/types.hpp>

#include "emff_cli/scenario.hpp"

namespace emff::cli {

struct AllocateArgs {
  Vec3 r = Vec3::Zero();
  Vec3 hint = Vec3::UnitZ();
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();
  double omega = 1.0;
  bool line_of_sight = false;  // command given in the LOS frame
  double tolerance = 1e-10;
};

/// Dipoles, objectives, gap and residual of one allocation.
nlohmann::json allocate_report(const AllocateArgs& args);

/// Header and one row per n; columns are documented in the README.
/// `extended` appends the j = n peak and the ordering-check columns.
void write_scan_csv(const Scenario& scenario, std::ostream& out, bool extended, int threads);

/// `scenario.samples` rows spanning [0, T] inclusive.
void write_orbit_csv(const Scenario& scenario, std::ostream& out);

/// Shortest round-trip formatting at 17 significant digits.
std::string format_number(double value);

}  // namespace emff::cli
