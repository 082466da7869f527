#include "emff/magnetics.hpp"

#include <cmath>
#include <numbers>

#include "emff/errors.hpp"

namespace emff {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void CoilDesign::validate() const {
  if (!positive_finite(turns) || !positive_finite(coil_radius) || !positive_finite(wire_radius) ||
      !positive_finite(resistivity)) {
    throw InputError("coil design fields must be finite and strictly positive");
  }
}

double CoilDesign::resistance() const {
  return 2.0 * coil_radius * turns * resistivity / (wire_radius * wire_radius);
}

double CoilDesign::dipole_per_current() const {
  return std::numbers::pi * turns * coil_radius * coil_radius;
}

double CoilDesign::resistance_per_gain_sq() const {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  return (2.0 * resistivity / (wire_radius * wire_radius)) /
         (pi2 * turns * coil_radius * coil_radius * coil_radius);
}

Vec3 DipoleWaveform::at(double t) const {
  return s * std::sin(omega * t) + c * std::cos(omega * t);
}

bool DipoleWaveform::finite() const {
  return s.allFinite() && c.allFinite() && std::isfinite(omega);
}

Vec6 Wrench::stacked() const {
  Vec6 u;
  u << force, torque;
  return u;
}

Wrench Wrench::from_stacked(const Vec6& u) { return Wrench{u.head<3>(), u.tail<3>()}; }

Wrench Wrench::rotated(const Mat3& rotation) const {
  return Wrench{rotation * force, rotation * torque};
}

Mat69 InteractionOperator::line_of_sight() const {
  Mat6 out_rot = Mat6::Zero();
  out_rot.topLeftCorner<3, 3>() = frame.transpose();
  out_rot.bottomRightCorner<3, 3>() = frame.transpose();
  Eigen::Matrix<double, 9, 9> in_rot;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      in_rot.block<3, 3>(3 * a, 3 * b) = frame(a, b) * frame;
    }
  }
  return out_rot * q * in_rot;
}

Mat3 build_los_frame(const Vec3& r, const Vec3& hint) {
  const double d = r.norm();
  if (!(d > kMinSeparation)) {
    throw ZeroSeparationError("separation below minimum (" + std::to_string(d) + " m)");
  }
  const Vec3 ex = r / d;
  Vec3 ey = r.cross(hint);
  if (!(ey.norm() > kParallelTolerance * d * hint.norm()) || !ey.allFinite()) {
    // Smallest-component world axis is the one least aligned with r.
    Eigen::Index axis = 0;
    ex.cwiseAbs().minCoeff(&axis);
    ey = r.cross(Vec3::Unit(axis));
  }
  ey.normalize();
  Mat3 c;
  c.col(0) = ex;
  c.col(1) = ey;
  c.col(2) = ex.cross(ey);
  return c;
}

Mat69 los_interaction_matrix(double separation) {
  const double d = separation;
  const double d3 = d * d * d;
  const double d4 = d3 * d;
  Mat69 psi = Mat69::Zero();
  // Force block, index 3*a + b multiplies mu_k[a] * mu_j[b].
  psi(0, 0) = -6.0 / d4;
  psi(0, 4) = 3.0 / d4;
  psi(0, 8) = 3.0 / d4;
  psi(1, 1) = 3.0 / d4;
  psi(1, 3) = 3.0 / d4;
  psi(2, 2) = 3.0 / d4;
  psi(2, 6) = 3.0 / d4;
  // Torque block.
  psi(3, 5) = 1.0 / d3;
  psi(3, 7) = -1.0 / d3;
  psi(4, 2) = 2.0 / d3;
  psi(4, 6) = 1.0 / d3;
  psi(5, 1) = -2.0 / d3;
  psi(5, 3) = -1.0 / d3;
  return psi;
}

InteractionOperator interaction_operator_with_torque_sign(const Vec3& r, const Vec3& hint,
                                                          double torque_sign) {
  InteractionOperator op;
  op.frame = build_los_frame(r, hint);
  op.separation = r.norm();
  Mat69 psi = los_interaction_matrix(op.separation);
  psi.bottomRows<3>() *= torque_sign;

  const Mat3& c = op.frame;
  Mat6 out_rot = Mat6::Zero();
  out_rot.topLeftCorner<3, 3>() = c;
  out_rot.bottomRightCorner<3, 3>() = c;
  // (Cᵀ ⊗ Cᵀ)
  Eigen::Matrix<double, 9, 9> in_rot;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      in_rot.block<3, 3>(3 * a, 3 * b) = c(b, a) * c.transpose();
    }
  }
  op.q = out_rot * psi * in_rot;
  return op;
}

InteractionOperator interaction_operator(const Vec3& r, const Vec3& hint) {
  return interaction_operator_with_torque_sign(r, hint, 1.0);
}

Wrench averaged_wrench(const InteractionOperator& op, const DipoleWaveform& dj,
                       const DipoleWaveform& dk) {
  if (dj.omega != dk.omega) {
    return {};
  }
  const Vec9 product = kron(dk.s, dj.s) + kron(dk.c, dj.c);
  return Wrench::from_stacked(0.5 * (kMu0 / (4.0 * std::numbers::pi)) * op.q * product);
}

Wrench instantaneous_wrench(const InteractionOperator& op, const Vec3& mu_j, const Vec3& mu_k) {
  return Wrench::from_stacked((kMu0 / (4.0 * std::numbers::pi)) * op.q * kron(mu_k, mu_j));
}

double common_period(double omega_j, double omega_k, int max_denominator) {
  if (!(omega_j > 0.0) || !(omega_k > 0.0)) {
    return 0.0;
  }
  // Continued-fraction convergents of ω_j/ω_k = p/q give T = 2πp/ω_j.
  const double ratio = omega_j / omega_k;
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double x = ratio;
  for (int iter = 0; iter < 64; ++iter) {
    const double a = std::floor(x);
    const long long ai = static_cast<long long>(a);
    const long long p2 = ai * p1 + p0;
    const long long q2 = ai * q1 + q0;
    if (q2 > max_denominator) {
      break;
    }
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    if (std::abs(static_cast<double>(p1) / static_cast<double>(q1) - ratio) <= 1e-12 * ratio) {
      return 2.0 * std::numbers::pi * static_cast<double>(p1) / omega_j;
    }
    const double frac = x - a;
    if (frac < 1e-15) {
      break;
    }
    x = 1.0 / frac;
  }
  return 0.0;
}

TimeAverage time_average_oracle(const Vec3& r, const DipoleWaveform& dj, const DipoleWaveform& dk,
                                double period, int steps) {
  if (steps < 64) {
    throw InputError("time_average_oracle needs at least 64 steps");
  }
  if (!(period > 0.0)) {
    throw InputError("time_average_oracle needs a positive period");
  }
  const InteractionOperator op = interaction_operator(r, Vec3::UnitZ());

  auto whole_cycles = [period](double omega) {
    const double cycles = period * omega / (2.0 * std::numbers::pi);
    return std::abs(cycles - std::round(cycles)) <= 1e-9 * std::max(1.0, cycles) &&
           std::round(cycles) >= 1.0;
  };

  const double h = period / steps;
  Vec6 sum = Vec6::Zero();
  for (int i = 0; i <= steps; ++i) {
    const double t = i * h;
    const double weight = (i == 0 || i == steps) ? 0.5 : 1.0;
    sum += weight * instantaneous_wrench(op, dj.at(t), dk.at(t)).stacked();
  }
  TimeAverage out;
  out.wrench = Wrench::from_stacked(sum / steps);
  out.commensurate = whole_cycles(dj.omega) && whole_cycles(dk.omega);
  return out;
}

}  // namespace emff
