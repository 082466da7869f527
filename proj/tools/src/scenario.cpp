#include "emff_cli/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include <nlohmann/json.hpp>

#include <emff/errors.hpp>

namespace emff::cli {
namespace {

using nlohmann::json;

constexpr double kDeg = std::numbers::pi / 180.0;

const json& section(const json& doc, const char* name) {
  if (!doc.contains(name) || !doc.at(name).is_object()) {
    throw InputError(std::string("scenario is missing the \"") + name + "\" object");
  }
  return doc.at(name);
}

double number(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) {
    throw InputError("scenario is missing " + path + "." + key);
  }
  const json& v = obj.at(key);
  if (!v.is_number() || !std::isfinite(v.get<double>())) {
    throw InputError(path + "." + key + " must be a finite number");
  }
  return v.get<double>();
}

std::optional<double> maybe_number(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key) || obj.at(key).is_null()) {
    return std::nullopt;
  }
  return number(obj, path, key);
}

double number_or(const json& obj, const std::string& path, const char* key, double fallback) {
  return maybe_number(obj, path, key).value_or(fallback);
}

std::vector<int> n_list(const json& grid) {
  if (!grid.contains("n")) {
    throw InputError("scenario is missing grid.n");
  }
  const json& v = grid.at("n");
  std::vector<int> out;
  if (v.is_number_integer()) {
    out.push_back(v.get<int>());
  } else if (v.is_array()) {
    for (const auto& item : v) {
      if (!item.is_number_integer()) {
        throw InputError("grid.n entries must be integers");
      }
      out.push_back(item.get<int>());
    }
  } else {
    throw InputError("grid.n must be an integer or a list of integers");
  }
  if (out.empty()) {
    throw InputError("grid.n must not be empty");
  }
  for (int n : out) {
    if (n < 1) {
      throw InputError("grid.n entries must be at least 1");
    }
  }
  return out;
}

}  // namespace

OrbitContext Scenario::context() const {
  OrbitContext ctx = make_context(altitude_m, inclination_rad, theta0_rad, k_j2);
  if (force_omega_z_equal_omega_xy) {
    ctx.omega_z = ctx.omega_xy;
  }
  return ctx;
}

DisturbanceField Scenario::field() const { return DisturbanceField::from_orbit(context(), plane); }

GridConfig Scenario::grid(int n) const {
  GridConfig cfg = r_l ? GridConfig::from_length(n, m_sys, *r_l) : GridConfig{n, m_sys, *d_sat};
  cfg.validate();
  return cfg;
}

Scenario parse_scenario(const json& doc) {
  if (!doc.is_object()) {
    throw InputError("scenario must be a JSON object");
  }
  Scenario s;

  const json& orbit = section(doc, "orbit");
  s.altitude_m = number(orbit, "orbit", "altitude_km") * 1e3;
  s.inclination_rad = number(orbit, "orbit", "inclination_deg") * kDeg;
  s.theta0_rad = number_or(orbit, "orbit", "theta0_deg", 0.0) * kDeg;
  s.k_j2 = maybe_number(orbit, "orbit", "k_j2_m5_per_s2");
  if (orbit.contains("force_omega_z_equal_omega_xy")) {
    if (!orbit.at("force_omega_z_equal_omega_xy").is_boolean()) {
      throw InputError("orbit.force_omega_z_equal_omega_xy must be a boolean");
    }
    s.force_omega_z_equal_omega_xy = orbit.at("force_omega_z_equal_omega_xy").get<bool>();
  }

  const json& plane = section(doc, "stable_plane");
  s.plane.theta_p = number(plane, "stable_plane", "theta_p_deg") * kDeg;
  s.plane.theta_z_xy = number(plane, "stable_plane", "theta_z_xy_deg") * kDeg;
  s.plane.r_xyd = number_or(plane, "stable_plane", "r_xyd_m", 1.0);
  s.plane.theta_xy = number_or(plane, "stable_plane", "theta_xy_deg", 0.0) * kDeg;
  if (!(s.plane.r_xyd > 0.0)) {
    throw InputError("stable_plane.r_xyd_m must be positive");
  }

  const json& grid = section(doc, "grid");
  s.n_values = n_list(grid);
  s.m_sys = number(grid, "grid", "m_sys_kg");
  s.d_sat = maybe_number(grid, "grid", "d_sat_m");
  s.r_l = maybe_number(grid, "grid", "r_l_m");
  if (s.d_sat.has_value() == s.r_l.has_value()) {
    throw InputError("grid needs exactly one of d_sat_m and r_l_m");
  }

  const json& coil = section(doc, "coil");
  s.coil.turns = number(coil, "coil", "turns");
  s.coil.coil_radius = number(coil, "coil", "coil_radius_m");
  s.coil.wire_radius = number(coil, "coil", "wire_radius_m");
  s.coil.resistivity = number(coil, "coil", "resistivity_ohm_m");
  s.coil.validate();

  if (doc.contains("sampling")) {
    const json& sampling = section(doc, "sampling");
    const double samples = number_or(sampling, "sampling", "samples", 720);
    if (samples < 4 || samples != std::floor(samples) || samples > 1e7) {
      throw InputError("sampling.samples must be an integer of at least 4");
    }
    s.samples = static_cast<int>(samples);
    s.power.dual_tolerance = number_or(sampling, "sampling", "dual_tolerance", 1e-10);
    s.power.refine_tolerance = number_or(sampling, "sampling", "refine_tolerance", 1e-3);
    if (!(s.power.dual_tolerance > 0.0 && s.power.dual_tolerance <= 1e-3)) {
      throw InputError("sampling.dual_tolerance must lie in (0, 1e-3]");
    }
    if (!(s.power.refine_tolerance > 0.0 && s.power.refine_tolerance < 1.0)) {
      throw InputError("sampling.refine_tolerance must lie in (0, 1)");
    }
  }

  if (doc.contains("output")) {
    const json& output = section(doc, "output");
    s.scan_csv = output.value("scan_csv", "");
    s.orbit_csv = output.value("orbit_csv", "");
  }

  // Fail early on bad orbit or plane parameters rather than mid-scan.
  const OrbitContext ctx = s.context();
  (void)desired_trajectory(s.plane, ctx, 0.0);
  for (int n : s.n_values) {
    (void)s.grid(n);
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open scenario file " + path.string());
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("scenario " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_scenario(doc);
}

}  // namespace emff::cli
