#pragma once

#include <numbers>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace emff {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Vec12 = Eigen::Matrix<double, 12, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat69 = Eigen::Matrix<double, 6, 9>;

/// Vacuum permeability [T·m/A].
inline constexpr double kMu0 = 4.0e-7 * std::numbers::pi;

/// Factor 8π/μ0 that maps a wrench [N, N·m] onto the dipole-product scale of
/// the allocation problem.
inline constexpr double kDualScale = 8.0 * std::numbers::pi / kMu0;

/// Kronecker product a ⊗ b of two 3-vectors; entry 3*i + k holds a[i]*b[k].
inline Vec9 kron(const Vec3& a, const Vec3& b) {
  Vec9 out;
  for (int i = 0; i < 3; ++i) {
    out.segment<3>(3 * i) = a[i] * b;
  }
  return out;
}

/// Column-major 3x3 view of a 9-vector (vec⁻¹).
inline Mat3 unvec(const Vec9& v) { return Eigen::Map<const Mat3>(v.data()); }

inline Vec9 vec(const Mat3& m) { return Eigen::Map<const Vec9>(m.data()); }

}  // namespace emff
