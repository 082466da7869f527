#pragma once

// Bucket-brigade disturbance cancellation along a line of 2n+1 satellites
// indexed -n..n. Each satellite cancels its own disturbance plus everything
// handed to it from further out through its inward neighbour, so the load
// accumulates towards the centre satellite 0.

#include <functional>
#include <vector>

#include "emff/magnetics.hpp"
#include "emff/orbit.hpp"
#include "emff/types.hpp"

namespace emff {

/// Mass/geometry prefactor m_sys n(n+1) / (6 (2n+1)³) [kg].
double chi_sys(double m_sys, int n);

struct GridConfig {
  int n = 1;            // half count; N_l = 2n + 1
  double m_sys = 0.0;   // total mass of all (2n+1)² satellites [kg]
  double d_sat = 0.0;   // spacing [m]

  static GridConfig from_length(int n, double m_sys, double r_l);

  void validate() const;
  int line_count() const { return 2 * n + 1; }
  double m_sat() const;
  double r_l() const;
  double chi() const { return chi_sys(m_sys, n); }
};

/// Block weights of L(n, j); force block first.
struct Weighting {
  double force = 0.0;
  double torque = 0.0;
  Mat6 matrix() const;
};

/// L(n, j) for 2 ≤ j ≤ n+1; throws InputError outside that range.
Weighting weighting(int n, int j);

/// Û = [3 K R_l; R_l × K R_l].
Vec6 unit_wrench(const Mat3& k, const Vec3& r_l);

/// K_orb(t) together with the unit direction p̂(t) of the line formation.
class DisturbanceField {
 public:
  using MatrixFn = std::function<Mat3(double)>;
  using DirectionFn = std::function<Vec3(double)>;

  DisturbanceField(MatrixFn k, DirectionFn direction, double period);

  /// K_orb from the J2 model and p̂ along the stable-orbit position p_d(t);
  /// the period is the in-plane orbit period.
  static DisturbanceField from_orbit(const OrbitContext& ctx, const StablePlane& plane);
  static DisturbanceField constant(const Mat3& k, const Vec3& direction, double period = 1.0);

  Mat3 k(double t) const { return k_(t); }
  /// T_orb; the second line family runs a quarter of it ahead.
  double period() const { return period_; }
  /// Unit vector; never zero.
  Vec3 direction(double t) const;
  /// Same field with p̂ → -p̂.
  DisturbanceField mirrored() const;

 private:
  MatrixFn k_;
  DirectionFn direction_;
  double period_;
};

/// f_d(j) = m_sat K (j d_sat p̂) for satellite index j ∈ [-n, n].
Vec3 disturbance_force(const GridConfig& cfg, const DisturbanceField& field, int index, double t);

/// u_{(j-2)←(j-1)} = χ_sys L(n, j) Û(r_l, t), the wrench on satellite j-2
/// from satellite j-1 (positive side of the line).
Wrench pair_command(const GridConfig& cfg, const DisturbanceField& field, int j, double t);

/// The same wrench assembled by summing individual disturbances outward of
/// satellite j-2 and propagating reactions pair by pair.
Wrench telescoping_oracle(const GridConfig& cfg, const DisturbanceField& field, int j, double t);

struct SatelliteBalance {
  int index = 0;
  Vec3 force = Vec3::Zero();   // Σ neighbour forces + f_d
  Vec3 torque = Vec3::Zero();  // Σ neighbour torques (τ_d = 0)
};

struct EquilibriumReport {
  std::vector<SatelliteBalance> satellites;  // ordered -n..n
  Vec3 center_force_sum = Vec3::Zero();      // f_{0←1} + f_{0←-1}
  Vec3 center_torque_sum = Vec3::Zero();     // τ_{0←1} + τ_{0←-1}
  /// Σ_j r_j × f_d(j) about the centre. Internal wrenches conserve angular
  /// momentum, so the centre torque balance is offset by exactly this.
  Vec3 net_disturbance_torque = Vec3::Zero();
};

/// Assembles every pair wrench, its reaction via momentum conservation and
/// the resulting balance at each satellite.
EquilibriumReport equilibrium_residuals(const GridConfig& cfg, const DisturbanceField& field,
                                        double t);

}  // namespace emff
