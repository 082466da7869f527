#pragma once

// Scenario files: JSON with the unit of every quantity spelled out in its key.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include <emff/brigade.hpp>
#include <emff/magnetics.hpp>
#include <emff/orbit.hpp>
#include <emff/power.hpp>

namespace emff::cli {

struct Scenario {
  // orbit
  double altitude_m = 0.0;
  double inclination_rad = 0.0;
  double theta0_rad = 0.0;
  std::optional<double> k_j2;  // [m⁵/s²]; absent means Earth's value
  bool force_omega_z_equal_omega_xy = false;

  StablePlane plane;

  // grid; exactly one of d_sat / r_l
  std::vector<int> n_values;
  double m_sys = 0.0;
  std::optional<double> d_sat;
  std::optional<double> r_l;

  CoilDesign coil;

  int samples = 720;
  PowerOptions power;

  std::string scan_csv;   // empty: stdout
  std::string orbit_csv;  // empty: stdout

  OrbitContext context() const;
  DisturbanceField field() const;
  GridConfig grid(int n) const;
};

/// Throws InputError describing the first offending key.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace emff::cli
