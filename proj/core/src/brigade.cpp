#include "emff/brigade.hpp"

#include <cmath>
#include <string>

#include "emff/errors.hpp"

namespace emff {

double chi_sys(double m_sys, int n) {
  const double nl = 2.0 * n + 1.0;
  return m_sys * (static_cast<double>(n) * (n + 1.0) / (6.0 * nl * nl * nl));
}

GridConfig GridConfig::from_length(int n, double m_sys, double r_l) {
  GridConfig cfg{n, m_sys, r_l / (2.0 * n + 1.0)};
  cfg.validate();
  return cfg;
}

void GridConfig::validate() const {
  if (n < 1) {
    throw InputError("grid half-count n must be at least 1");
  }
  if (!(m_sys > 0.0) || !std::isfinite(m_sys) || !(d_sat > 0.0) || !std::isfinite(d_sat)) {
    throw InputError("grid mass and spacing must be positive");
  }
}

double GridConfig::m_sat() const {
  const double nl = line_count();
  return m_sys / (nl * nl);
}

double GridConfig::r_l() const { return line_count() * d_sat; }

Mat6 Weighting::matrix() const {
  Mat6 l = Mat6::Zero();
  l.topLeftCorner<3, 3>() = force * Mat3::Identity();
  l.bottomRightCorner<3, 3>() = torque * Mat3::Identity();
  return l;
}

Weighting weighting(int n, int j) {
  if (n < 1 || j < 2 || j > n + 1) {
    throw InputError("pair index j=" + std::to_string(j) + " outside [2, n+1] for n=" +
                     std::to_string(n));
  }
  const double nn = n;
  const double jj = j;
  Weighting w;
  w.force = (nn - jj + 2.0) * (nn + jj - 1.0) / (nn * (nn + 1.0));
  w.torque = (nn - jj + 2.0) * (nn - jj + 3.0) * (2.0 * nn + jj - 1.0) /
             (nn * (nn + 1.0) * (2.0 * nn + 1.0));
  return w;
}

Vec6 unit_wrench(const Mat3& k, const Vec3& r_l) {
  const Vec3 kr = k * r_l;
  Vec6 u;
  u << 3.0 * kr, r_l.cross(kr);
  return u;
}

DisturbanceField::DisturbanceField(MatrixFn k, DirectionFn direction, double period)
    : k_(std::move(k)), direction_(std::move(direction)), period_(period) {
  if (!(period_ > 0.0) || !std::isfinite(period_)) {
    throw InputError("disturbance field period must be positive");
  }
}

DisturbanceField DisturbanceField::from_orbit(const OrbitContext& ctx, const StablePlane& plane) {
  // Validate the plane once so that errors surface at construction.
  (void)desired_trajectory(plane, ctx, 0.0);
  return DisturbanceField([ctx](double t) { return j2_disturbance_matrix(ctx, t); },
                          [ctx, plane](double t) { return desired_trajectory(plane, ctx, t); },
                          ctx.period());
}

DisturbanceField DisturbanceField::constant(const Mat3& k, const Vec3& direction, double period) {
  return DisturbanceField([k](double) { return k; }, [direction](double) { return direction; },
                          period);
}

Vec3 DisturbanceField::direction(double t) const {
  const Vec3 p = direction_(t);
  const double norm = p.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw InputError("line direction is zero or not finite");
  }
  return p / norm;
}

DisturbanceField DisturbanceField::mirrored() const {
  return DisturbanceField(
      k_, [dir = direction_](double t) -> Vec3 { return -dir(t); }, period_);
}

Vec3 disturbance_force(const GridConfig& cfg, const DisturbanceField& field, int index, double t) {
  if (index < -cfg.n || index > cfg.n) {
    throw InputError("satellite index outside [-n, n]");
  }
  return cfg.m_sat() * field.k(t) * (static_cast<double>(index) * cfg.d_sat * field.direction(t));
}

Wrench pair_command(const GridConfig& cfg, const DisturbanceField& field, int j, double t) {
  const Weighting w = weighting(cfg.n, j);
  const Vec6 u = unit_wrench(field.k(t), cfg.r_l() * field.direction(t));
  const double chi = cfg.chi();
  return Wrench{chi * w.force * u.head<3>(), chi * w.torque * u.tail<3>()};
}

Wrench telescoping_oracle(const GridConfig& cfg, const DisturbanceField& field, int j, double t) {
  (void)weighting(cfg.n, j);  // range check
  const Vec3 p = field.direction(t);
  // Force on k-1 from k: everything from k outward, F_k = Σ_{i=k}^{n} f_d(i).
  auto inward_force = [&](int k) {
    Vec3 f = Vec3::Zero();
    for (int i = k; i <= cfg.n; ++i) {
      f += disturbance_force(cfg, field, i, t);
    }
    return f;
  };
  Wrench out;
  out.force = inward_force(j - 1);
  Vec3 accumulated = Vec3::Zero();
  for (int k = j - 1; k <= cfg.n; ++k) {
    accumulated += inward_force(k);
  }
  out.torque = cfg.d_sat * p.cross(accumulated);
  return out;
}

EquilibriumReport equilibrium_residuals(const GridConfig& cfg, const DisturbanceField& field,
                                        double t) {
  const int n = cfg.n;
  const Vec3 p = field.direction(t);
  const DisturbanceField mirror = field.mirrored();

  // Wrench on the inner satellite of each pair, indexed by the outer
  // satellite's distance from the centre (1..n); the negative side is the
  // mirror image p̂ → -p̂.
  std::vector<Wrench> inner_pos(n + 1), inner_neg(n + 1);
  for (int k = 1; k <= n; ++k) {
    inner_pos[k] = pair_command(cfg, field, k + 1, t);
    inner_neg[k] = pair_command(cfg, mirror, k + 1, t);
  }
  // Reaction on the outer satellite: f_out = -f_in and
  // τ_out = -τ_in - (r_out - r_in) × f_out.
  auto reaction = [&](const Wrench& inner, const Vec3& offset) {
    Wrench outer;
    outer.force = -inner.force;
    outer.torque = -inner.torque - offset.cross(outer.force);
    return outer;
  };
  const Vec3 step = cfg.d_sat * p;

  EquilibriumReport report;
  report.satellites.resize(2 * n + 1);
  for (int idx = -n; idx <= n; ++idx) {
    SatelliteBalance& b = report.satellites[idx + n];
    b.index = idx;
    b.force = disturbance_force(cfg, field, idx, t);
    const int a = std::abs(idx);
    const std::vector<Wrench>& side = idx >= 0 ? inner_pos : inner_neg;
    const Vec3 outward = idx >= 0 ? step : Vec3(-step);
    if (idx == 0) {
      b.force += inner_pos[1].force + inner_neg[1].force;
      b.torque += inner_pos[1].torque + inner_neg[1].torque;
      report.center_force_sum = inner_pos[1].force + inner_neg[1].force;
      report.center_torque_sum = inner_pos[1].torque + inner_neg[1].torque;
      continue;
    }
    // Reaction from the inward neighbour.
    const Wrench from_inner = reaction(side[a], outward);
    b.force += from_inner.force;
    b.torque += from_inner.torque;
    // Pair with the outward neighbour, where this satellite is the inner one.
    if (a < n) {
      b.force += side[a + 1].force;
      b.torque += side[a + 1].torque;
    }
  }
  for (int idx = -n; idx <= n; ++idx) {
    const Vec3 r = static_cast<double>(idx) * step;
    report.net_disturbance_torque += r.cross(disturbance_force(cfg, field, idx, t));
  }
  return report;
}

}  // namespace emff
