#pragma once

// Reference formulas kept independent of the library: they are written from
// the field of a point dipole rather than from the interaction operator.

#include <cmath>
#include <cstdint>
#include <numbers>

#include <emff/types.hpp>

namespace emff::test {

inline constexpr double kMu0Over4Pi = 1e-7;

/// Field of dipole mu at displacement r from it.
inline Vec3 dipole_field(const Vec3& mu, const Vec3& r) {
  const double d = r.norm();
  const Vec3 e = r / d;
  return kMu0Over4Pi * (3.0 * mu.dot(e) * e - mu) / (d * d * d);
}

/// Force on mu_j sitting at r (relative to mu_k): ∇(mu_j · B_k).
inline Vec3 dipole_force(const Vec3& mu_j, const Vec3& mu_k, const Vec3& r) {
  const double d = r.norm();
  const Vec3 e = r / d;
  const double a = mu_j.dot(e);
  const double b = mu_k.dot(e);
  return 3.0 * kMu0Over4Pi / std::pow(d, 4) *
         (a * mu_k + b * mu_j + mu_j.dot(mu_k) * e - 5.0 * a * b * e);
}

/// Same force by central differences of the interaction energy.
inline Vec3 dipole_force_numeric(const Vec3& mu_j, const Vec3& mu_k, const Vec3& r) {
  const double h = 1e-5 * r.norm();
  Vec3 f;
  for (int i = 0; i < 3; ++i) {
    const Vec3 step = h * Vec3::Unit(i);
    f[i] = (mu_j.dot(dipole_field(mu_k, r + step)) - mu_j.dot(dipole_field(mu_k, r - step))) /
           (2.0 * h);
  }
  return f;
}

/// Torque on mu_j about its own centre.
inline Vec3 dipole_torque(const Vec3& mu_j, const Vec3& mu_k, const Vec3& r) {
  return mu_j.cross(dipole_field(mu_k, r));
}

/// Portable generator for property tests.
class Random {
 public:
  explicit Random(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  double normal() {
    const double u1 = 1.0 - uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * uniform());
  }
  Vec3 vector() { return Vec3(normal(), normal(), normal()); }
  Vec3 direction() { return vector().normalized(); }
  Mat3 rotation() {
    Eigen::Quaterniond q(normal(), normal(), normal(), normal());
    return q.normalized().toRotationMatrix();
  }
  Mat3 symmetric(double scale) {
    Mat3 a;
    for (int i = 0; i < 9; ++i) {
      a(i) = normal();
    }
    return scale * 0.5 * (a + a.transpose());
  }

 private:
  std::uint64_t state_;
};

inline double relative(const Eigen::Ref<const Eigen::VectorXd>& a,
                       const Eigen::Ref<const Eigen::VectorXd>& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

}  // namespace emff::test
