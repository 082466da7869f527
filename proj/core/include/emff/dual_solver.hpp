#pragma once

// Lagrange dual of the two-coil dipole allocation problem:
//
//   maximize   J_d = -(8π/μ0) λᵀu
//   subject to P(λ) = [[I, R(λ)], [R(λ)ᵀ, I]] ⪰ 0,   vec(R(λ)) = Qᵀλ,
//
// which is the same as σ_max(R(λ)) ≤ 1. λ = 0 is strictly feasible, so the
// problem always has a finite optimum for finite u.

#include <string>

#include "emff/errors.hpp"
#include "emff/magnetics.hpp"
#include "emff/types.hpp"

namespace emff {

/// Singular values of R(λ*) within this distance of 1 are treated as active.
inline constexpr double kActiveTolerance = 1e-6;

struct DualProblem {
  Mat69 q = Mat69::Zero();
  Vec6 u = Vec6::Zero();  // commanded wrench, same frame as q

  /// Problem in the frame the operator is expressed in (world).
  static DualProblem world(const InteractionOperator& op, const Wrench& command);
  /// Problem in the operator's line-of-sight frame; `command` is given in
  /// the world frame and rotated into LOS.
  static DualProblem line_of_sight(const InteractionOperator& op, const Wrench& command);
};

struct DualCertificate {
  Vec6 lambda = Vec6::Zero();
  Mat3 r_lambda = Mat3::Zero();
  double objective = 0.0;     // J_d [A²m⁴]
  double sigma_max = 0.0;     // σ_max(R_λ)
  double kkt_residual = 0.0;  // relative duality-gap bound at termination
  int newton_steps = 0;
};

class ConvergenceError : public NumericError {
 public:
  ConvergenceError(const std::string& what, DualCertificate best)
      : NumericError(what), best_(std::move(best)) {}
  const DualCertificate& best_iterate() const { return best_; }

 private:
  DualCertificate best_;
};

/// R(λ) = mat(Qᵀλ), column-major.
Mat3 multiplier_matrix(const Mat69& q, const Vec6& lambda);

struct Feasibility {
  bool feasible = false;
  double margin = 0.0;  // 1 - σ_max
};

Feasibility psd_feasible(const Mat3& r);

/// Barrier path-following solve to relative duality gap `tol` (0 < tol ≤ 1e-3).
DualCertificate solve_dual(const DualProblem& problem, double tol = 1e-10);

}  // namespace emff
