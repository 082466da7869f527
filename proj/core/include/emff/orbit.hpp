#pragma once

// Linearised relative motion about a J2-compensated circular reference orbit,
// in LVLH coordinates (x radial, y along-track, z cross-track).

#include <functional>
#include <optional>
#include <vector>

#include "emff/types.hpp"

namespace emff {

using State = Vec6;  // [x, y, z, ẋ, ẏ, ż]

struct EarthModel {
  double mu = 3.986004418e14;  // [m³/s²]
  double radius = 6378137.0;   // [m]
  double j2 = 1.08263e-3;

  /// k_J2 = (3/2) J2 μ R_E² [m⁵/s²].
  double k_j2() const { return 1.5 * j2 * mu * radius * radius; }
};

struct OrbitContext {
  double mu_g = 0.0;
  double r_ref = 0.0;   // [m]
  double incl = 0.0;    // [rad]
  double theta0 = 0.0;  // [rad]
  double k_j2 = 0.0;    // [m⁵/s²]

  double omega_o = 0.0;  // √(μ/r³)
  double s_j2 = 0.0;
  double c_plus = 1.0;
  double c_minus = 1.0;
  double omega_xy = 0.0;  // c₋ ω_o
  double omega_z = 0.0;   // ω_o (c₊ + k_J2 cos²i / (μ r²))

  /// In-plane period 2π/ω_xy.
  double period() const;
  /// Along-track drift coefficient ε₂ = (3 + 5 s_J2) ω_xy / (c₊ c₋).
  double drift_rate() const;
};

/// Throws InputError for altitude ≤ 0 or |s_J2| ≥ 1. `k_j2` overrides the
/// Earth model's value (0 switches J2 off).
OrbitContext make_context(double altitude, double incl, double theta0,
                          std::optional<double> k_j2 = std::nullopt,
                          const EarthModel& earth = {});

struct RelativeElements {
  double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0, c5 = 0.0, c6 = 0.0;
  double r_xy = 0.0;
  double theta_xy = 0.0;
  double r_z = 0.0;
  double theta_z = 0.0;
  double l = 0.0;  // cross-track amplitude drift [m/s]
};

RelativeElements relative_elements(const State& state, const OrbitContext& ctx);

/// Elements of the same trajectory re-referenced so that t = 0 falls at `t`.
RelativeElements advance_elements(const RelativeElements& elems, const OrbitContext& ctx,
                                  double t);

Vec3 propagate_analytic(const RelativeElements& elems, const OrbitContext& ctx, double t);
State propagate_state(const RelativeElements& elems, const OrbitContext& ctx, double t);

/// Passively stable relative orbit of a given size and tilt.
struct StablePlane {
  double theta_p = 0.0;     // plane tilt Θ_P [rad]
  double theta_z_xy = 0.0;  // Θ_z−xy [rad]
  double r_xyd = 0.0;       // in-plane size [m]
  double theta_xy = 0.0;    // in-plane phase at t = 0 [rad]

  /// z-phase θ_xy + atan(2 tan Θ_z−xy).
  double theta_z() const;
};

Vec3 desired_trajectory(const StablePlane& plane, const OrbitContext& ctx, double t);

/// Cross-track forcing from running z at ω_z instead of ω_xy.
double freq_mismatch_disturbance(double r_zd, double theta_z, const OrbitContext& ctx, double t);

/// Zero-trace J2 gradient fluctuation about its orbit average, θ = θ0 + ω_z t.
Mat3 j2_gradient_fluctuation(const OrbitContext& ctx, double t);

/// K_orb(t): gradient fluctuation plus the -(ω_z² - ω_xy²) cross-track term.
Mat3 j2_disturbance_matrix(const OrbitContext& ctx, double t);

using AccelerationFn = std::function<Vec3(double, const State&)>;

struct TrajectorySample {
  double t = 0.0;
  State state = State::Zero();
};

/// Fixed-step RK4 of the linearised dynamics over [0, duration]; u_fn and
/// d_fn return control and disturbance accelerations. Steps longer than
/// period()/1000 are rejected.
std::vector<TrajectorySample> integrate_dynamics(const State& initial, const OrbitContext& ctx,
                                                 const AccelerationFn& u_fn,
                                                 const AccelerationFn& d_fn, double duration,
                                                 double dt);

}  // namespace emff
