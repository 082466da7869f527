#include "emff/orbit.hpp"

#include <cmath>
#include <numbers>

#include "emff/errors.hpp"

namespace emff {

double OrbitContext::period() const { return 2.0 * std::numbers::pi / omega_xy; }

double OrbitContext::drift_rate() const {
  return (3.0 + 5.0 * s_j2) * omega_xy / (c_plus * c_minus);
}

OrbitContext make_context(double altitude, double incl, double theta0, std::optional<double> k_j2,
                          const EarthModel& earth) {
  if (!(altitude > 0.0) || !std::isfinite(altitude)) {
    throw InputError("altitude must be positive");
  }
  OrbitContext ctx;
  ctx.mu_g = earth.mu;
  ctx.r_ref = earth.radius + altitude;
  ctx.incl = incl;
  ctx.theta0 = theta0;
  ctx.k_j2 = k_j2.value_or(earth.k_j2());

  const double r2 = ctx.r_ref * ctx.r_ref;
  ctx.omega_o = std::sqrt(ctx.mu_g / (r2 * ctx.r_ref));
  ctx.s_j2 = ctx.k_j2 * (1.0 + 3.0 * std::cos(2.0 * incl)) / (4.0 * ctx.mu_g * r2);
  if (!(std::abs(ctx.s_j2) < 1.0)) {
    throw InputError("|s_J2| must be below 1");
  }
  ctx.c_plus = std::sqrt(1.0 + ctx.s_j2);
  ctx.c_minus = std::sqrt(1.0 - ctx.s_j2);
  ctx.omega_xy = ctx.c_minus * ctx.omega_o;
  const double ci = std::cos(incl);
  ctx.omega_z = ctx.omega_o * (ctx.c_plus + ctx.k_j2 * ci * ci / (ctx.mu_g * r2));
  return ctx;
}

RelativeElements relative_elements(const State& state, const OrbitContext& ctx) {
  const double w = ctx.omega_xy;
  const double xb = ctx.c_plus * state[0];
  const double yb = ctx.c_minus * state[1];
  const double xb_dot = ctx.c_plus * state[3];
  const double yb_dot = ctx.c_minus * state[4];

  RelativeElements e;
  e.c1 = ctx.c_plus / (ctx.c_minus * ctx.c_minus) * (2.0 * xb + yb_dot / w);
  e.c4 = (yb - 2.0 * xb_dot / w) / ctx.c_minus;
  e.c2 = (yb - ctx.c_minus * e.c4) / 2.0;
  e.c3 = xb - 2.0 * ctx.c_plus * e.c1;
  e.r_xy = std::hypot(e.c2, e.c3);
  e.theta_xy = std::atan2(e.c3, e.c2);
  e.c5 = state[5] / ctx.omega_z;
  e.c6 = state[2];
  e.r_z = std::hypot(e.c5, e.c6);
  e.theta_z = std::atan2(e.c6, e.c5);
  e.l = 0.0;
  return e;
}

RelativeElements advance_elements(const RelativeElements& elems, const OrbitContext& ctx,
                                  double t) {
  RelativeElements e = elems;
  e.c4 = elems.c4 - ctx.drift_rate() * elems.c1 * t;
  e.theta_xy = std::remainder(elems.theta_xy + ctx.omega_xy * t, 2.0 * std::numbers::pi);
  e.c2 = e.r_xy * std::cos(e.theta_xy);
  e.c3 = e.r_xy * std::sin(e.theta_xy);
  e.r_z = elems.r_z + elems.l * t;
  e.theta_z = std::remainder(elems.theta_z + ctx.omega_z * t, 2.0 * std::numbers::pi);
  e.c5 = e.r_z * std::cos(e.theta_z) + e.l / ctx.omega_z * std::sin(e.theta_z);
  e.c6 = e.r_z * std::sin(e.theta_z);
  return e;
}

State propagate_state(const RelativeElements& e, const OrbitContext& ctx, double t) {
  const double w = ctx.omega_xy;
  const double eps2 = ctx.drift_rate();
  const double phase = w * t + e.theta_xy;
  const double zphase = ctx.omega_z * t + e.theta_z;
  const double amp_z = e.r_z + e.l * t;

  State s;
  s[0] = 2.0 * e.c1 + e.r_xy * std::sin(phase) / ctx.c_plus;
  s[1] = e.c4 - eps2 * e.c1 * t + 2.0 * e.r_xy * std::cos(phase) / ctx.c_minus;
  s[2] = amp_z * std::sin(zphase);
  s[3] = e.r_xy * w * std::cos(phase) / ctx.c_plus;
  s[4] = -eps2 * e.c1 - 2.0 * e.r_xy * w * std::sin(phase) / ctx.c_minus;
  s[5] = e.l * std::sin(zphase) + amp_z * ctx.omega_z * std::cos(zphase);
  return s;
}

Vec3 propagate_analytic(const RelativeElements& elems, const OrbitContext& ctx, double t) {
  return propagate_state(elems, ctx, t).head<3>();
}

double StablePlane::theta_z() const { return theta_xy + std::atan(2.0 * std::tan(theta_z_xy)); }

Vec3 desired_trajectory(const StablePlane& plane, const OrbitContext& ctx, double t) {
  const double tan_p = std::tan(plane.theta_p);
  if (!std::isfinite(tan_p) || std::abs(tan_p) < 1e-12) {
    throw InputError("plane tilt must have a finite non-zero tangent");
  }
  const double cos_tilt = std::cos(plane.theta_z_xy);
  if (std::abs(cos_tilt) < 1e-12) {
    throw InputError("Θ_z−xy must stay away from ±90°");
  }
  const double theta_z = plane.theta_z();
  const double cos_shift = std::cos(theta_z - plane.theta_xy);
  if (std::abs(cos_shift) < 1e-12) {
    throw InputError("degenerate z-phase in stable plane");
  }
  const double phase = ctx.omega_xy * t + plane.theta_xy;
  const double z_amp = plane.r_xyd / tan_p * cos_tilt / cos_shift;
  return Vec3(plane.r_xyd * std::sin(phase) / ctx.c_plus,
              2.0 * plane.r_xyd * std::cos(phase) / ctx.c_minus,
              z_amp * std::sin(ctx.omega_xy * t + theta_z));
}

double freq_mismatch_disturbance(double r_zd, double theta_z, const OrbitContext& ctx, double t) {
  const double wxy = ctx.omega_xy;
  const double wz = ctx.omega_z;
  return r_zd * (wxy * wxy * std::sin(wxy * t + theta_z) - wz * wz * std::sin(wz * t + theta_z));
}

Mat3 j2_gradient_fluctuation(const OrbitContext& ctx, double t) {
  const double theta = ctx.theta0 + ctx.omega_z * t;
  const double si = std::sin(ctx.incl);
  const double si2 = si * si;
  const double s2i = std::sin(2.0 * ctx.incl);
  const double c2t = std::cos(2.0 * theta);
  const double s2t = std::sin(2.0 * theta);
  const double st = std::sin(theta);
  const double ct = std::cos(theta);
  const double r = ctx.r_ref;
  const double scale = ctx.k_j2 / (2.0 * r * r * r * r * r);

  Mat3 k;
  k << 12.0 * si2 * c2t, 4.0 * si2 * s2t, 4.0 * s2i * st,
       4.0 * si2 * s2t, -7.0 * si2 * c2t, -s2i * ct,
       4.0 * s2i * st, -s2i * ct, -5.0 * si2 * c2t;
  return scale * k;
}

Mat3 j2_disturbance_matrix(const OrbitContext& ctx, double t) {
  Mat3 k = j2_gradient_fluctuation(ctx, t);
  k(2, 2) -= ctx.omega_z * ctx.omega_z - ctx.omega_xy * ctx.omega_xy;
  return k;
}

std::vector<TrajectorySample> integrate_dynamics(const State& initial, const OrbitContext& ctx,
                                                 const AccelerationFn& u_fn,
                                                 const AccelerationFn& d_fn, double duration,
                                                 double dt) {
  if (!(dt > 0.0) || dt > ctx.period() / 1000.0 * (1.0 + 1e-12)) {
    throw InputError("integration step must be positive and at most T_orb/1000");
  }
  if (!(duration >= 0.0)) {
    throw InputError("integration duration must be non-negative");
  }
  const double w = ctx.omega_xy;
  const double kappa = 4.0 * w * w * ctx.s_j2 / (ctx.c_minus * ctx.c_minus);

  auto rhs = [&](double t, const State& s) {
    Vec3 a = Vec3::Zero();
    if (u_fn) a += u_fn(t, s);
    if (d_fn) a += d_fn(t, s);
    const double xb = ctx.c_plus * s[0];
    const double xb_dot = ctx.c_plus * s[3];
    const double yb_dot = ctx.c_minus * s[4];
    const double xb_ddot = 2.0 * w * yb_dot + 3.0 * w * w * xb + kappa * (2.0 * xb + yb_dot / w) +
                           ctx.c_plus * a[0];
    const double yb_ddot = -2.0 * w * xb_dot + ctx.c_minus * a[1];
    State out;
    out.head<3>() = s.tail<3>();
    out[3] = xb_ddot / ctx.c_plus;
    out[4] = yb_ddot / ctx.c_minus;
    out[5] = -ctx.omega_z * ctx.omega_z * s[2] + a[2];
    return out;
  };

  const auto steps = static_cast<long>(std::ceil(duration / dt - 1e-9));
  const double h = steps > 0 ? duration / static_cast<double>(steps) : 0.0;
  std::vector<TrajectorySample> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  State s = initial;
  out.push_back({0.0, s});
  for (long i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) * h;
    const State k1 = rhs(t, s);
    const State k2 = rhs(t + 0.5 * h, s + 0.5 * h * k1);
    const State k3 = rhs(t + 0.5 * h, s + 0.5 * h * k2);
    const State k4 = rhs(t + h, s + h * k3);
    s += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.push_back({static_cast<double>(i + 1) * h, s});
  }
  return out;
}

}  // namespace emff
