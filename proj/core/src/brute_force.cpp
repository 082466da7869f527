#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>

#include "emff/allocation.hpp"
#include "emff/errors.hpp"

namespace emff {

namespace {

using Mat12 = Eigen::Matrix<double, 12, 12>;

struct Penalised {
  const Mat69& q;
  const Vec6& target;
  Vec6 multiplier;
  double rho;

  double value(const Vec12& m, Vec12* grad) const {
    const Vec6 c = constraint_residual(q, m, target);
    if (grad != nullptr) {
      const Vec6 w = multiplier + rho * c;
      // Gradient of wᵀ Q x(m) with x = s_k ⊗ s_j + c_k ⊗ c_j is the
      // bilinear form of R_w = mat(Qᵀ w): d/ds_j = R_w s_k, d/ds_k = R_wᵀ s_j.
      const Mat3 rw = unvec(q.transpose() * w);
      grad->segment<3>(0) = m.segment<3>(0) + rw * m.segment<3>(3);
      grad->segment<3>(3) = m.segment<3>(3) + rw.transpose() * m.segment<3>(0);
      grad->segment<3>(6) = m.segment<3>(6) + rw * m.segment<3>(9);
      grad->segment<3>(9) = m.segment<3>(9) + rw.transpose() * m.segment<3>(6);
    }
    return 0.5 * m.squaredNorm() + multiplier.dot(c) + 0.5 * rho * c.squaredNorm();
  }
};

// Quasi-Newton minimisation of the augmented Lagrangian.
Vec12 bfgs(const Penalised& f, Vec12 m, int max_iterations, double grad_tol) {
  Mat12 h = Mat12::Identity();
  Vec12 g;
  double fx = f.value(m, &g);
  for (int it = 0; it < max_iterations; ++it) {
    if (g.norm() <= grad_tol) {
      break;
    }
    Vec12 dir = -h * g;
    if (dir.dot(g) >= 0.0) {
      h.setIdentity();
      dir = -g;
    }
    double step = 1.0;
    Vec12 m_next, g_next;
    double f_next = fx;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      m_next = m + step * dir;
      f_next = f.value(m_next, &g_next);
      if (f_next <= fx + 1e-4 * step * g.dot(dir)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      break;
    }
    const Vec12 s = m_next - m;
    const Vec12 y = g_next - g;
    const double sy = s.dot(y);
    if (sy > 1e-14 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Mat12 v = Mat12::Identity() - rho * s * y.transpose();
      h = v * h * v.transpose() + rho * s * s.transpose();
    }
    m = m_next;
    g = g_next;
    fx = f_next;
  }
  return m;
}

}  // namespace

AllocationSolution brute_force_allocate(const Vec3& r, const Vec3& hint, const Wrench& command,
                                        int restarts, std::uint64_t seed, double omega,
                                        CommandFrame frame) {
  if (restarts < 20) {
    throw InputError("brute_force_allocate needs at least 20 restarts");
  }
  const InteractionOperator op = interaction_operator(r, hint);
  const Wrench world = frame == CommandFrame::kWorld ? command : command.rotated(op.frame);

  AllocationSolution best;
  best.dipole_j.omega = omega;
  best.dipole_k.omega = omega;
  best.dual_objective = std::numeric_limits<double>::quiet_NaN();
  best.gap = std::numeric_limits<double>::quiet_NaN();
  if (world.stacked().isZero(0.0)) {
    return best;
  }

  // Normalise so that the operator and the command both have unit size; the
  // amplitudes then scale by sqrt(|target|).
  const DualProblem los = DualProblem::line_of_sight(op, world);
  const double q_scale = los.q.norm();
  const Mat69 q = los.q / q_scale;
  const Vec6 raw_target = kDualScale * los.u / q_scale;
  const double amplitude_sq = raw_target.norm();
  const Vec6 target = raw_target / amplitude_sq;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  double best_value = std::numeric_limits<double>::infinity();
  Vec12 best_m = Vec12::Zero();
  for (int start = 0; start < restarts; ++start) {
    Vec12 m;
    for (int i = 0; i < 12; ++i) {
      m[i] = normal(rng);
    }
    Penalised f{q, target, Vec6::Zero(), 10.0};
    double prev_violation = std::numeric_limits<double>::infinity();
    for (int outer = 0; outer < 80; ++outer) {
      m = bfgs(f, m, 400, 1e-11);
      const Vec6 c = constraint_residual(q, m, target);
      const double violation = c.norm();
      f.multiplier += f.rho * c;
      if (violation <= 1e-12) {
        break;
      }
      if (violation > 0.25 * prev_violation) {
        f.rho = std::min(f.rho * 10.0, 1e9);
      }
      prev_violation = violation;
    }
    m = project_to_feasible(q, target, m);
    if (constraint_residual(q, m, target).norm() > 1e-9) {
      continue;
    }
    const double value = 0.5 * m.squaredNorm();
    if (value < best_value) {
      best_value = value;
      best_m = m;
    }
  }
  if (!std::isfinite(best_value)) {
    throw NoFeasiblePointError("no restart reached a feasible allocation");
  }

  const Vec12 m = std::sqrt(amplitude_sq) * best_m;
  DipoleWaveform dj{m.segment<3>(0), m.segment<3>(6), omega};
  DipoleWaveform dk{m.segment<3>(3), m.segment<3>(9), omega};
  best.dipole_j = DipoleWaveform{op.frame * dj.s, op.frame * dj.c, omega};
  best.dipole_k = DipoleWaveform{op.frame * dk.s, op.frame * dk.c, omega};
  best.primal_objective = 0.5 * m.squaredNorm();
  best.wrench_residual =
      averaged_wrench(op, best.dipole_j, best.dipole_k).stacked() - world.stacked();
  return best;
}

}  // namespace emff
