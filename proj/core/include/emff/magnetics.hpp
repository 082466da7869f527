#pragma once

// Far-field interaction between two sinusoidally driven magnetic dipoles.
//
// Conventions used throughout the library:
//   * r = r_j - r_k points from the k-th (source) coil to the j-th coil.
//   * Dipole products are ordered mu_k ⊗ mu_j (k outer, j inner), so entry
//     3*a + b of the product is mu_k[a] * mu_j[b].
//   * The wrench u = [f; tau] is the force and torque acting on coil j,
//     torque taken about coil j's centre.

#include "emff/types.hpp"

namespace emff {

/// Separations below this are rejected; the model diverges as d^-4.
inline constexpr double kMinSeparation = 1e-3;

/// Relative size of |r x hint| below which the frame hint is treated as
/// parallel to r.
inline constexpr double kParallelTolerance = 1e-9;

struct CoilDesign {
  double turns = 0.0;
  double coil_radius = 0.0;    // [m]
  double wire_radius = 0.0;    // [m]
  double resistivity = 0.0;    // [Ω·m]

  /// Throws InputError unless every field is finite and strictly positive.
  void validate() const;

  /// Single-axis coil resistance 2·a·N·p / r_w² [Ω].
  double resistance() const;

  /// Dipole moment per unit current π·N·a² [m²].
  double dipole_per_current() const;

  /// R_coil / γ² = (2p / r_w²) / (π² N a³) [Ω/m⁴]; converts squared dipole
  /// amplitude [A²m⁴] into dissipated power [W].
  double resistance_per_gain_sq() const;
};

/// mu(t) = s·sin(ωt) + c·cos(ωt).
struct DipoleWaveform {
  Vec3 s = Vec3::Zero();  // [A·m²]
  Vec3 c = Vec3::Zero();  // [A·m²]
  double omega = 1.0;     // [rad/s]

  Vec3 at(double t) const;
  /// ‖s‖² + ‖c‖².
  double energy() const { return s.squaredNorm() + c.squaredNorm(); }
  bool finite() const;
};

struct Wrench {
  Vec3 force = Vec3::Zero();   // [N]
  Vec3 torque = Vec3::Zero();  // [N·m]

  Vec6 stacked() const;
  static Wrench from_stacked(const Vec6& u);
  double norm() const { return stacked().norm(); }
  Wrench rotated(const Mat3& rotation) const;
};

/// Interaction operator Q (6x9) expressed in the world frame, together with
/// the line-of-sight frame C whose columns are the LOS axes in world
/// coordinates. Q omits the μ0/4π prefactor.
struct InteractionOperator {
  Mat69 q = Mat69::Zero();
  double separation = 0.0;
  Mat3 frame = Mat3::Identity();

  /// The same operator in LOS coordinates, i.e. the [Ψ_f; Ψ_τ] block.
  Mat69 line_of_sight() const;
};

/// LOS frame from separation r and a hint vector: first axis r/|r|, second
/// axis along r × hint. A hint parallel to r (or zero) falls back to the
/// world axis along which r has the smallest component.
Mat3 build_los_frame(const Vec3& r, const Vec3& hint);

/// [Ψ_f; Ψ_τ] for separation d along the LOS x-axis.
Mat69 los_interaction_matrix(double separation);

InteractionOperator interaction_operator(const Vec3& r, const Vec3& hint);

/// Q(r) with the torque block multiplied by `torque_sign`. Only the
/// verification fault-injection hook uses a value other than +1.
InteractionOperator interaction_operator_with_torque_sign(const Vec3& r, const Vec3& hint,
                                                          double torque_sign);

/// First-order time average of the wrench on j from k. Waveforms with
/// different frequencies do not interact on average and give zero.
Wrench averaged_wrench(const InteractionOperator& op, const DipoleWaveform& dj,
                       const DipoleWaveform& dk);

/// Wrench on j from k for instantaneous dipoles mu_j, mu_k.
Wrench instantaneous_wrench(const InteractionOperator& op, const Vec3& mu_j, const Vec3& mu_k);

struct TimeAverage {
  Wrench wrench;
  /// False when `period` is not (within tolerance) a common multiple of both
  /// waveform periods, in which case the average is not the true mean.
  bool commensurate = true;
};

/// Trapezoidal average of instantaneous_wrench over [0, period] using
/// `steps` intervals (steps >= 64).
TimeAverage time_average_oracle(const Vec3& r, const DipoleWaveform& dj, const DipoleWaveform& dk,
                                double period, int steps);

/// Shortest period common to both waveforms, found by rational approximation
/// of ω_j/ω_k with denominators up to `max_denominator`. Returns 0 when no
/// such period exists.
double common_period(double omega_j, double omega_k, int max_denominator = 1000);

}  // namespace emff
