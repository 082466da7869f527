#include "emff/dual_solver.hpp"

#include <array>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

namespace emff {

namespace {

constexpr double kBarrierDegree = 6.0;  // dimension of the 6x6 LMI block
constexpr double kBarrierGrowth = 10.0;
constexpr int kMaxNewtonSteps = 2000;
// δ²/2 below this counts as centred; the gap bound 6/t is then inflated by a
// factor well under 1e-3, and round-off in the Newton decrement near the
// cone boundary sits around 1e-9.
constexpr double kCenteringDecrement = 1e-6;

using Mat66 = Eigen::Matrix<double, 6, 6>;

Mat66 lmi_block(const Mat3& r) {
  Mat66 p = Mat66::Identity();
  p.topRightCorner<3, 3>() = r;
  p.bottomLeftCorner<3, 3>() = r.transpose();
  return p;
}

double sigma_max(const Mat3& r) {
  return Eigen::JacobiSVD<Mat3>(r).singularValues()(0);
}

struct BarrierState {
  bool feasible = false;
  double log_det = 0.0;
  Mat66 inverse;
};

BarrierState evaluate(const Mat3& r) {
  BarrierState s;
  Eigen::LLT<Mat66> llt(lmi_block(r));
  if (llt.info() != Eigen::Success) {
    return s;
  }
  double log_det = 0.0;
  for (int i = 0; i < 6; ++i) {
    const double lii = llt.matrixLLT()(i, i);
    if (!(lii > 0.0)) {
      return s;
    }
    log_det += 2.0 * std::log(lii);
  }
  s.feasible = std::isfinite(log_det);
  s.log_det = log_det;
  s.inverse = llt.solve(Mat66::Identity());
  return s;
}

}  // namespace

DualProblem DualProblem::world(const InteractionOperator& op, const Wrench& command) {
  return DualProblem{op.q, command.stacked()};
}

DualProblem DualProblem::line_of_sight(const InteractionOperator& op, const Wrench& command) {
  return DualProblem{op.line_of_sight(), command.rotated(op.frame.transpose()).stacked()};
}

Mat3 multiplier_matrix(const Mat69& q, const Vec6& lambda) {
  const Vec9 v = q.transpose() * lambda;
  return unvec(v);
}

Feasibility psd_feasible(const Mat3& r) {
  const double s = sigma_max(r);
  return Feasibility{s <= 1.0, 1.0 - s};
}

DualCertificate solve_dual(const DualProblem& problem, double tol) {
  if (!(tol > 0.0) || tol > 1e-3) {
    throw InputError("solve_dual tolerance must lie in (0, 1e-3]");
  }
  if (!problem.q.allFinite() || !problem.u.allFinite()) {
    throw InputError("solve_dual received non-finite data");
  }

  DualCertificate cert;
  const double u_norm = problem.u.norm();
  if (u_norm == 0.0) {
    return cert;
  }

  // Work with the unit command b̂ and minimise b̂ᵀλ; J_d = -(8π/μ0)|u| b̂ᵀλ.
  const Vec6 b = problem.u / u_norm;
  std::array<Mat3, 6> basis;
  for (int i = 0; i < 6; ++i) {
    basis[i] = multiplier_matrix(problem.q, Vec6::Unit(i));
  }
  auto r_of = [&](const Vec6& lambda) {
    Mat3 r = Mat3::Zero();
    for (int i = 0; i < 6; ++i) {
      r += lambda[i] * basis[i];
    }
    return r;
  };

  // Scale the first barrier weight to the boundary point along -b̂.
  const double reach = 1.0 / sigma_max(r_of(b));
  double t = kBarrierDegree / reach;

  Vec6 lambda = Vec6::Zero();
  BarrierState state = evaluate(Mat3::Zero());
  int steps = 0;

  auto objective_value = [&](const Vec6& l) { return -b.dot(l); };

  while (true) {
    // Centering by damped Newton on t·b̂ᵀλ − log det P(λ).
    while (true) {
      if (steps >= kMaxNewtonSteps) {
        cert.lambda = lambda;
        cert.r_lambda = r_of(lambda);
        cert.objective = kDualScale * u_norm * objective_value(lambda);
        cert.sigma_max = sigma_max(cert.r_lambda);
        cert.kkt_residual = kBarrierDegree / (t * std::max(objective_value(lambda), 1e-300));
        cert.newton_steps = steps;
        throw ConvergenceError("dual barrier solver exceeded its Newton-step budget", cert);
      }
      ++steps;

      // P⁻¹ A_i with A_i = [[0, B_i], [B_iᵀ, 0]].
      std::array<Mat66, 6> m;
      Vec6 grad;
      for (int i = 0; i < 6; ++i) {
        Mat66 a = Mat66::Zero();
        a.topRightCorner<3, 3>() = basis[i];
        a.bottomLeftCorner<3, 3>() = basis[i].transpose();
        m[i] = state.inverse * a;
        grad[i] = t * b[i] - m[i].trace();
      }
      Mat6 hess;
      for (int i = 0; i < 6; ++i) {
        for (int k = i; k < 6; ++k) {
          const double h = m[i].cwiseProduct(m[k].transpose()).sum();
          hess(i, k) = h;
          hess(k, i) = h;
        }
      }
      Eigen::LDLT<Mat6> ldlt(hess);
      const Vec6 step = -ldlt.solve(grad);
      const double decrement_sq = -grad.dot(step);
      if (!std::isfinite(decrement_sq)) {
        break;
      }
      if (decrement_sq / 2.0 <= kCenteringDecrement) {
        break;
      }

      // Damped step keeps P(λ) inside the cone for a self-concordant barrier;
      // backtracking guards against round-off at the boundary.
      const double decrement = std::sqrt(decrement_sq);
      double alpha = decrement > 0.25 ? 1.0 / (1.0 + decrement) : 1.0;
      const double phi = t * b.dot(lambda) - state.log_det;
      bool moved = false;
      bool progressed = false;
      for (int k = 0; k < 60; ++k) {
        const Vec6 trial = lambda + alpha * step;
        BarrierState next = evaluate(r_of(trial));
        if (next.feasible) {
          const double phi_next = t * b.dot(trial) - next.log_det;
          if (phi_next <= phi - 0.25 * alpha * decrement_sq ||
              phi_next <= phi + 1e-14 * std::abs(phi)) {
            progressed = phi_next < phi;
            lambda = trial;
            state = std::move(next);
            moved = true;
            break;
          }
        }
        alpha *= 0.5;
      }
      // Without a strict decrease the iterate is at the round-off floor.
      if (!moved || (!progressed && decrement_sq < 1e-3)) {
        break;
      }
    }

    const double value = objective_value(lambda);
    const double gap = kBarrierDegree / t;
    if (value > 0.0 && gap <= tol * value) {
      break;
    }
    t *= kBarrierGrowth;
  }

  cert.lambda = lambda;
  cert.r_lambda = r_of(lambda);
  cert.objective = kDualScale * u_norm * objective_value(lambda);
  cert.sigma_max = sigma_max(cert.r_lambda);
  cert.kkt_residual = kBarrierDegree / (t * objective_value(lambda));
  cert.newton_steps = steps;
  if (!std::isfinite(cert.objective)) {
    throw ConvergenceError("dual objective is not finite", cert);
  }
  return cert;
}

}  // namespace emff
